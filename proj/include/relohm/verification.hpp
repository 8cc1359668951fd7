// SPDX-License-Identifier: Apache-2.0
//
// Randomized invariant suites over the whole library. Each suite draws its
// own configurations from a Sampler seeded with (seed + suite index), so
// results are reproducible for a fixed seed and independent of suite order.
#pragma once

#include <chrono>
#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "relohm/ohm_forms.hpp"
#include "relohm/sampling.hpp"

namespace relohm {

struct VerifyOptions {
  std::size_t samples = 1000;
  std::uint64_t seed = 20140521;
  UnitsConfig units;
  /// Scales the closed-form boost result by (1 + fault) to check that the
  /// suites notice a broken prefactor.
  double fault = 0.0;
};

struct SuiteResult {
  std::string name;
  std::size_t samples = 0;
  double max_residual = 0.0;
  double tolerance = 0.0;
  double seconds = 0.0;

  [[nodiscard]] bool passed() const { return max_residual <= tolerance; }
};

namespace suites {

/// Relative continuity defect |omega rho - k.j| / max(|omega rho|, |k||j|).
inline double continuity_defect(cplx rho, const CVec3& j, const Wavevector4& kw) {
  const cplx lhs = kw.omega * rho;
  const cplx rhs = kw.k.cast<cplx>().dot(j);
  const double scale = std::max({std::abs(lhs), kw.k.norm() * j.norm(), 1e-300});
  return std::abs(lhs - rhs) / scale;
}

/// Four-current produced by a potential through the full response tensor.
inline FourCurrent current_from_response(const FrameSample& s, const PotentialSet& pot,
                                         const UnitsConfig& u) {
  const FullResponse4 full = reconstruct_full(chi_from_sigma(s.sigma, s.at.omega), s.at, u);
  return apply_response(full, pot, u);
}

/// Same current through E = -i k phi + i omega A and Ohm's law.
inline FourCurrent current_from_ohm(const FrameSample& s, const PotentialSet& pot) {
  const FieldSet f = fields_from_potential(pot);
  return {induced_charge(s.sigma, f.e, s.at), ohm_current(s.sigma, f.e), s.at};
}

inline PotentialSet random_potential(Sampler& rng, const Wavevector4& at) {
  return {rng.complex_unit(), rng.cvec3(), at};
}

}  // namespace suites

inline std::vector<SuiteResult> run_verification(const VerifyOptions& opt) {
  using Clock = std::chrono::steady_clock;
  const UnitsConfig& u = opt.units;
  const auto direct = [&](const FrameSample& s, const Vec3& v) {
    FrameSample out = boost_sigma_direct(s, v, u);
    out.sigma *= (1.0 + opt.fault);
    return out;
  };

  std::vector<SuiteResult> results;
  std::uint64_t index = 0;
  const auto run = [&](const std::string& name, double tol,
                       const std::function<double(Sampler&)>& body) {
    Sampler rng(opt.seed + index++, u);
    SuiteResult r{name, opt.samples, 0.0, tol, 0.0};
    const auto t0 = Clock::now();
    for (std::size_t i = 0; i < opt.samples; ++i) {
      const double res = body(rng);
      // NaN must fail the suite.
      if (!(res <= r.max_residual)) r.max_residual = std::isnan(res) ? INFINITY : res;
    }
    r.seconds = std::chrono::duration<double>(Clock::now() - t0).count();
    results.push_back(r);
  };

  run("oracle-equivalence", 1e-10, [&](Sampler& rng) {
    const auto bc = rng.boost_case();
    const FrameSample a = direct(bc.sample, bc.v);
    const FrameSample b = transform_sigma_oracle(bc.sample, boost_matrix(bc.v, u), u);
    return relative_error(a.sigma, b.sigma);
  });

  run("round-trip", 1e-10, [&](Sampler& rng) {
    const auto bc = rng.boost_case();
    const FrameSample back = boost_sigma_inverse(direct(bc.sample, bc.v), bc.v, bc.sample.at, u);
    return relative_error(back.sigma, bc.sample.sigma);
  });

  run("gauge-invariance", 1e-13, [&](Sampler& rng) {
    const FrameSample s{rng.sigma(), rng.point()};
    const PotentialSet pot = suites::random_potential(rng, s.at);
    const cplx f = rng.complex_unit();
    const CVec4 j0 = suites::current_from_response(s, pot, u).four_vector(u);
    const CVec4 j1 = suites::current_from_response(s, gauge_shift(pot, f), u).four_vector(u);
    return max_abs(CVec4(j1 - j0)) / (max_abs(j0) + max_abs(pot.four_vector(u)));
  });

  run("continuity", 1e-12, [&](Sampler& rng) {
    const auto bc = rng.boost_case();
    const PotentialSet pot = suites::random_potential(rng, bc.sample.at);
    const FourCurrent a = suites::current_from_response(bc.sample, pot, u);
    const FourCurrent b = suites::current_from_ohm(bc.sample, pot);
    const FieldSet f = fields_from_electric(rng.cvec3(), bc.sample.at);
    const OhmResult g = generalized_ohm(rng.sigma(), bc.v, f, u);
    return std::max({suites::continuity_defect(a.rho, a.j, a.at),
                     suites::continuity_defect(b.rho, b.j, b.at),
                     suites::continuity_defect(g.rho, g.j, f.at)});
  });

  run("ohm-covariance", 1e-10, [&](Sampler& rng) {
    const auto bc = rng.boost_case();
    const LorentzMatrix l = boost_matrix(bc.v, u);
    const PotentialSet pot = suites::random_potential(rng, bc.sample.at);
    const CVec4 lab = l.apply(suites::current_from_response(bc.sample, pot, u).four_vector(u));
    const FrameSample moved = direct(bc.sample, bc.v);
    const PotentialSet pot_moved =
        PotentialSet::from_four_vector(l.apply(pot.four_vector(u)), moved.at, u);
    const CVec4 native = suites::current_from_ohm(moved, pot_moved).four_vector(u);
    return relative_error(native, lab);
  });

  run("generalized-ohm-pipeline", 1e-10, [&](Sampler& rng) {
    const auto bc = rng.boost_case();
    // bc.sample plays the primed-frame conductivity; fields live in the lab.
    const Wavevector4 lab_at = bc.sample.at;
    const Wavevector4 primed_at = transform_wavevector(boost_matrix(bc.v, u), lab_at, u);
    const FrameSample primed{bc.sample.sigma, primed_at};
    const FieldSet f = fields_from_electric(rng.cvec3(), lab_at);
    const OhmResult g = generalized_ohm(primed.sigma, bc.v, f, u);
    const FrameSample lab = boost_sigma_inverse(primed, bc.v, lab_at, u);
    const CVec3 j = ohm_current(lab.sigma, f.e);
    const cplx rho = induced_charge(lab.sigma, f.e, lab_at);
    CVec4 a, b;
    a << g.rho, g.j;
    b << rho, j;
    return relative_error(a, b);
  });

  run("textbook-specialization", 1e-12, [&](Sampler& rng) {
    const auto bc = rng.boost_case();
    const cplx s = rng.complex_unit();
    const FieldSet f = fields_from_electric(rng.cvec3(), bc.sample.at);
    const OhmResult g = generalized_ohm(s * SpatialTensor3::Identity(), bc.v, f, u);
    return relative_error(g.drift_current, textbook_ohm(s, bc.v, f, u));
  });

  run("constraint-covariance", 1e-12, [&](Sampler& rng) {
    const auto bc = rng.boost_case();
    const OracleTrace t = transform_sigma_trace(bc.sample, boost_matrix(bc.v, u), u);
    const ConstraintResidual r = constraint_residual(t.chi_primed, u);
    return std::max(r.left, r.right);
  });

  run("projector-identity", 1e-13, [&](Sampler& rng) {
    const auto bc = rng.boost_case();
    const Vec3& k = bc.sample.at.k;
    const double w = bc.sample.at.omega;
    const Mat3 p = Mat3::Identity() - (k * bc.v.transpose()) / w;
    return max_abs(Mat3(p * projector_inverse(k, bc.v, w) - Mat3::Identity()));
  });

  run("rotation-consistency", 1e-13, [&](Sampler& rng) {
    const FrameSample s{rng.sigma(), rng.point()};
    const Mat3 r = rng.rotation();
    const FrameSample a = rotate_sigma(s, r);
    const FrameSample b = transform_sigma_oracle(s, rotation_embed(r), u);
    return relative_error(a.sigma, b.sigma);
  });

  run("nonrelativistic-scaling", 0.5, [&](Sampler& rng) {
    // |k| c <= omega keeps |B| c <= |E|, where the O(v^2/c^2) expansion is uniform.
    const double w = rng.omega();
    const Wavevector4 at{w, rng.wavevector(w / u.c)};
    const FieldSet f = fields_from_electric(rng.cvec3(), at);
    const cplx s = rng.complex_unit();
    const Vec3 v = (u.c * rng.uniform(0.02, 0.2)) * rng.direction();
    const auto gap = [&](const Vec3& vel) {
      return max_abs(CVec3(textbook_ohm(s, vel, f, u) - textbook_ohm_nr(s, vel, f)));
    };
    return std::abs(gap(v) / gap(0.5 * v) - 4.0);
  });

  return results;
}

}  // namespace relohm

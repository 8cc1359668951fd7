// SPDX-License-Identifier: Apache-2.0
//
// Frame transformations of the conductivity tensor.
//
// Two independent routes are provided:
//  * closed-form laws for a pure boost (direct and converse) and for
//    rotations, written entirely in 3x3 algebra;
//  * transform_sigma_oracle, which rebuilds chi^mu_nu, conjugates it with
//    an arbitrary O(1,3) element and reads sigma' back out.
// The two are expected to agree to rounding; the test-suite relies on it.
#pragma once

#include <string>

#include "relohm/minkowski.hpp"
#include "relohm/response_tensor.hpp"

namespace relohm {

/// Conductivity together with the point at which it is sampled.
struct FrameSample {
  SpatialTensor3 sigma = SpatialTensor3::Zero();
  Wavevector4 at;
};

/// Relative width of the excluded band around omega = v.k.
inline constexpr double kResonanceRelTol = 1e-9;

/// Throws BoostResonance when |omega - v.k| <= 1e-9 max(|omega|, |v.k|).
inline void require_off_resonance(double omega, double v_dot_k) {
  const double gap = std::abs(omega - v_dot_k);
  const double guard = kResonanceRelTol * std::max(std::abs(omega), std::abs(v_dot_k));
  if (!(gap > guard)) {
    throw BoostResonance("boosted frequency vanishes: |omega - v.k| = " +
                         format_real(gap) + " (omega = " + format_real(omega) +
                         ", v.k = " + format_real(v_dot_k) + ")");
  }
}

/// (1 - k v^T / omega)^{-1} = 1 + k v^T / (omega - v.k).
inline Mat3 projector_inverse(const Vec3& kvec, const Vec3& v, double omega) {
  const double vk = v.dot(kvec);
  require_off_resonance(omega, vk);
  return Mat3::Identity() + (kvec * v.transpose()) / (omega - vk);
}

namespace detail {

inline void require_sample(const FrameSample& s) {
  if (!s.sigma.allFinite() || !s.at.finite()) {
    throw InvariantViolation("frame sample has non-finite entries");
  }
  require_dynamic(s.at.omega);
}

}  // namespace detail

/// sigma'(k', omega') =
///   (1/gamma) (1 - v.k/omega)^{-1} L (1 - v k^T/omega) sigma (1 - k v^T/omega) L
/// with L the spatial block of boost(v) and (k', omega') = boost(v) (k, omega).
inline FrameSample boost_sigma_direct(const FrameSample& s, const Vec3& v,
                                      const UnitsConfig& units = {}) {
  const BoostParams p = BoostParams::make(v, units);
  detail::require_sample(s);
  const double omega = s.at.omega;
  const Vec3& k = s.at.k;
  require_off_resonance(omega, v.dot(k));

  const Mat3 left = p.spatial * (Mat3::Identity() - (v * k.transpose()) / omega);
  const Mat3 right = (Mat3::Identity() - (k * v.transpose()) / omega) * p.spatial;
  const double prefactor = 1.0 / (p.gamma * (1.0 - v.dot(k) / omega));

  FrameSample out;
  out.at = transform_wavevector(boost_matrix(p, units), s.at, units);
  out.sigma = prefactor * (left.cast<cplx>() * s.sigma * right.cast<cplx>());
  return out;
}

/// Converse of boost_sigma_direct: given sigma' at boost(v) applied to
/// kw_unprimed, returns sigma at kw_unprimed:
///   gamma (1 - v k^T/omega)^{-1} L^{-1} sigma' L^{-1} ((1 - v.k/omega) 1 + k v^T/omega).
inline FrameSample boost_sigma_inverse(const FrameSample& s_primed, const Vec3& v,
                                       const Wavevector4& kw_unprimed,
                                       const UnitsConfig& units = {}) {
  const BoostParams p = BoostParams::make(v, units);
  detail::require_sample(s_primed);
  require_dynamic(kw_unprimed.omega);
  const double omega = kw_unprimed.omega;
  const Vec3& k = kw_unprimed.k;
  const double vk = v.dot(k);
  require_off_resonance(omega, vk);

  const Wavevector4 expected = transform_wavevector(boost_matrix(p, units), kw_unprimed, units);
  const double scale = std::max({std::abs(expected.omega), expected.k.cwiseAbs().maxCoeff(),
                                 std::abs(omega), k.cwiseAbs().maxCoeff()});
  const double mismatch = std::max(std::abs(expected.omega - s_primed.at.omega),
                                   (expected.k - s_primed.at.k).cwiseAbs().maxCoeff());
  if (mismatch > 1e-12 * std::max(scale, 1.0)) {
    throw FrameMismatch("primed sample at " + describe(s_primed.at) +
                        " is not the boost of " + describe(kw_unprimed) + " (expected " +
                        describe(expected) + ")");
  }

  // (1 - v k^T / omega)^{-1} is the transpose of the projector inverse.
  const Mat3 left = projector_inverse(v, k, omega) * p.spatial_inverse;
  const Mat3 right =
      p.spatial_inverse * ((1.0 - vk / omega) * Mat3::Identity() + (k * v.transpose()) / omega);

  FrameSample out;
  out.at = kw_unprimed;
  out.sigma = p.gamma * (left.cast<cplx>() * s_primed.sigma * right.cast<cplx>());
  return out;
}

/// sigma'(R k, omega) = R sigma(k, omega) R^{-1}.
inline FrameSample rotate_sigma(const FrameSample& s, const Mat3& r) {
  require_orthogonal(r);
  const CMat3 rc = r.cast<cplx>();
  return {rc * s.sigma * rc.transpose(), {s.at.omega, r * s.at.k}};
}

/// Intermediate products of the three-step route, exposed for diagnostics.
struct OracleTrace {
  FullResponse4 chi;
  FullResponse4 chi_primed;
  FrameSample result;
};

/// sigma -> chi = i omega sigma -> full chi^mu_nu -> Lambda chi Lambda^{-1}
/// -> spatial block / (i omega').
inline OracleTrace transform_sigma_trace(const FrameSample& s, const LorentzMatrix& l,
                                         const UnitsConfig& units = {}) {
  detail::require_sample(s);
  OracleTrace t;
  t.chi = reconstruct_full(chi_from_sigma(s.sigma, s.at.omega), s.at, units);
  t.chi_primed = transform_response(t.chi, l, units);

  // Same guard as require_off_resonance: for a boost these two terms are
  // gamma omega and gamma v.k.
  const double time_term = l(0, 0) * s.at.omega;
  const double space_term = units.c * (l.matrix().block<1, 3>(0, 1) * s.at.k)(0);
  const double omega_p = t.chi_primed.at.omega;
  const double guard = kResonanceRelTol * std::max(std::abs(time_term), std::abs(space_term));
  if (!(std::abs(omega_p) > guard)) {
    throw BoostResonance("transformed frequency vanishes at " + describe(t.chi_primed.at));
  }
  require_dynamic(omega_p, "transformed omega");

  t.result = {sigma_from_chi(t.chi_primed.spatial(), omega_p), t.chi_primed.at};
  return t;
}

inline FrameSample transform_sigma_oracle(const FrameSample& s, const LorentzMatrix& l,
                                          const UnitsConfig& units = {}) {
  return transform_sigma_trace(s, l, units).result;
}

}  // namespace relohm

// SPDX-License-Identifier: Apache-2.0
//
// The fundamental response tensor chi^mu_nu(k, omega) relating the induced
// four-current j^mu = (c rho, j) to the four-potential A^nu = (phi / c, A).
//
// Fourier convention: fields vary as exp(i k.x - i omega t), so
// d/dx_k -> i k_k and d/dt -> -i omega. With this convention the spatial
// block is chi_kl = i omega sigma_kl.
#pragma once

#include <string>

#include "relohm/minkowski.hpp"

namespace relohm {

/// Frequencies with |omega| below this are treated as static and refused:
/// every 1 / omega in the theory is singular there.
inline constexpr double kStaticFrequencyThreshold = 1e-14;

inline void require_dynamic(double omega, const char* what = "omega") {
  if (!std::isfinite(omega)) {
    throw StaticFrequency(std::string(what) + " is not finite");
  }
  if (std::abs(omega) < kStaticFrequencyThreshold) {
    throw StaticFrequency(std::string(what) + " = " + format_real(omega) +
                          " is static (|omega| < 1e-14); 1/omega terms are singular");
  }
}

/// chi^mu_nu at one sample point (mixed indices, row = mu, column = nu).
struct FullResponse4 {
  CMat4 entries = CMat4::Zero();
  Wavevector4 at;

  [[nodiscard]] SpatialTensor3 spatial() const { return entries.bottomRightCorner<3, 3>(); }
};

struct PotentialSet {
  cplx phi{0.0, 0.0};
  CVec3 a = CVec3::Zero();
  Wavevector4 at;

  /// A^nu = (phi / c, A).
  [[nodiscard]] CVec4 four_vector(const UnitsConfig& units) const {
    CVec4 out;
    out << phi / units.c, a;
    return out;
  }
  static PotentialSet from_four_vector(const CVec4& a_mu, const Wavevector4& at,
                                       const UnitsConfig& units) {
    return {a_mu(0) * units.c, a_mu.tail<3>(), at};
  }
};

struct FourCurrent {
  cplx rho{0.0, 0.0};
  CVec3 j = CVec3::Zero();
  Wavevector4 at;

  /// j^mu = (c rho, j).
  [[nodiscard]] CVec4 four_vector(const UnitsConfig& units) const {
    CVec4 out;
    out << units.c * rho, j;
    return out;
  }
  static FourCurrent from_four_vector(const CVec4& j_mu, const Wavevector4& at,
                                      const UnitsConfig& units) {
    return {j_mu(0) / units.c, j_mu.tail<3>(), at};
  }
};

inline SpatialTensor3 chi_from_sigma(const SpatialTensor3& sigma, double omega) {
  require_dynamic(omega);
  return (I * omega) * sigma;
}

inline SpatialTensor3 sigma_from_chi(const SpatialTensor3& chi, double omega) {
  require_dynamic(omega);
  return chi / (I * omega);
}

/// Rebuilds the full tensor from its spatial block using the gauge and
/// continuity constraints:
///   chi^0_0 = -(c/omega)^2 k^T chi k,   chi^0_l = (c/omega) (k^T chi)_l,
///   chi^k_0 = -(c/omega) (chi k)_k,     chi^k_l = chi_kl.
inline FullResponse4 reconstruct_full(const SpatialTensor3& chi, const Wavevector4& kw,
                                      const UnitsConfig& units = {}) {
  require_dynamic(kw.omega);
  const double r = units.c / kw.omega;
  const CVec3 k = kw.k.cast<cplx>();
  const Eigen::RowVector3cd kT_chi = k.transpose() * chi;
  const CVec3 chi_k = chi * k;

  FullResponse4 out;
  out.at = kw;
  out.entries(0, 0) = -(r * r) * (kT_chi * k)(0);
  out.entries.block<1, 3>(0, 1) = r * kT_chi;
  out.entries.block<3, 1>(1, 0) = -r * chi_k;
  out.entries.bottomRightCorner<3, 3>() = chi;
  return out;
}

struct ConstraintResidual {
  double left = 0.0;   ///< ||k_mu chi^mu_nu|| / ||chi||
  double right = 0.0;  ///< ||chi^mu_nu k^nu|| / ||chi||
};

inline ConstraintResidual constraint_residual(const FullResponse4& full,
                                              const UnitsConfig& units = {}) {
  const double norm = max_abs(full.entries);
  if (norm == 0.0) return {};
  const CVec4 k_lower = full.at.covariant(units).cast<cplx>();
  const CVec4 k_upper = full.at.contravariant(units).cast<cplx>();
  const Eigen::RowVector4cd left = k_lower.transpose() * full.entries;
  const CVec4 right = full.entries * k_upper;
  return {max_abs(left) / norm, max_abs(right) / norm};
}

/// j^mu = chi^mu_nu A^nu.
inline FourCurrent apply_response(const FullResponse4& full, const PotentialSet& pot,
                                  const UnitsConfig& units = {}) {
  if (pot.at != full.at) {
    throw FrameMismatch("potential sampled at " + describe(pot.at) +
                        " but response tensor at " + describe(full.at));
  }
  return FourCurrent::from_four_vector(full.entries * pot.four_vector(units), full.at, units);
}

/// A^mu -> A^mu + d^mu f, i.e. phi -> phi + i omega f and A -> A + i k f.
inline PotentialSet gauge_shift(const PotentialSet& pot, cplx f) {
  PotentialSet out = pot;
  out.phi += I * pot.at.omega * f;
  out.a += (I * f) * pot.at.k.cast<cplx>();
  return out;
}

/// Pointwise Lorentz tensor transformation Lambda chi Lambda^{-1} at k' = Lambda k.
inline FullResponse4 transform_response(const FullResponse4& full, const LorentzMatrix& l,
                                        const UnitsConfig& units = {}) {
  FullResponse4 out;
  out.at = transform_wavevector(l, full.at, units);
  out.entries = l.matrix().cast<cplx>() * full.entries * inverse(l).matrix().cast<cplx>();
  return out;
}

}  // namespace relohm

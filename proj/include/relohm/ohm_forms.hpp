// SPDX-License-Identifier: Apache-2.0
//
// Observable fields and Ohm's-law currents at one (k, omega).
//
// The generalized law expresses the drift current j - v rho in the lab
// frame through the conductivity sigma' of a frame moving with velocity v:
//   j - v rho = gamma L^{-1} sigma'(k', omega') L^{-1} (E + v x B)
// where L is the spatial block of boost(v). For scalar sigma' this reduces
// to gamma sigma' (E - v (v.E) / c^2 + v x B), and dropping O(v^2/c^2) to
// sigma' (E + v x B).
#pragma once

#include "relohm/transform.hpp"

namespace relohm {

/// E and B amplitudes. B always obeys Faraday's law omega B = k x E.
struct FieldSet {
  CVec3 e = CVec3::Zero();
  CVec3 b = CVec3::Zero();
  Wavevector4 at;
};

struct OhmResult {
  CVec3 drift_current = CVec3::Zero();  ///< j - v rho
  CVec3 j = CVec3::Zero();
  cplx rho{0.0, 0.0};
};

/// a x b without conjugation (Eigen's complex cross product conjugates).
inline CVec3 cross(const Vec3& a, const CVec3& b) {
  return {a.y() * b.z() - a.z() * b.y(), a.z() * b.x() - a.x() * b.z(),
          a.x() * b.y() - a.y() * b.x()};
}

/// E = -i k phi + i omega A, B = i k x A.
inline FieldSet fields_from_potential(const PotentialSet& pot) {
  const CVec3 k = pot.at.k.cast<cplx>();
  FieldSet f;
  f.at = pot.at;
  f.e = -I * pot.phi * k + (I * pot.at.omega) * pot.a;
  f.b = I * cross(pot.at.k, pot.a);
  return f;
}

/// Builds the field set for a given E, with B from Faraday's law.
inline FieldSet fields_from_electric(const CVec3& e, const Wavevector4& kw) {
  require_dynamic(kw.omega);
  return {e, cross(kw.k, e) / kw.omega, kw};
}

inline double faraday_residual(const FieldSet& f) {
  const CVec3 diff = f.at.omega * f.b - cross(f.at.k, f.e);
  const double scale = std::max({std::abs(f.at.omega) * max_abs(f.b),
                                 f.at.k.norm() * max_abs(f.e), 1e-300});
  return max_abs(diff) / scale;
}

inline CVec3 ohm_current(const SpatialTensor3& sigma, const CVec3& e) { return sigma * e; }

/// rho = k . (sigma E) / omega.
inline cplx induced_charge(const SpatialTensor3& sigma, const CVec3& e, const Wavevector4& kw) {
  require_dynamic(kw.omega);
  return kw.k.cast<cplx>().dot(sigma * e) / kw.omega;
}

/// Recovers (j, rho) from the drift current j - v rho using continuity
/// rho = k . j / omega, i.e. j = (1 - v k^T / omega)^{-1} drift.
inline OhmResult split_drift(const CVec3& drift, const Vec3& v, const Wavevector4& kw) {
  require_dynamic(kw.omega);
  OhmResult out;
  out.drift_current = drift;
  out.j = projector_inverse(v, kw.k, kw.omega).cast<cplx>() * drift;
  out.rho = kw.k.cast<cplx>().dot(out.j) / kw.omega;
  return out;
}

namespace detail {

inline void require_faraday(const FieldSet& f) {
  const double r = faraday_residual(f);
  if (r > 1e-12) {
    throw InvariantViolation("magnetic field is not Faraday-consistent (omega B != k x E, "
                             "relative residual " + format_real(r) + ")");
  }
}

}  // namespace detail

/// sigma_primed must already be evaluated at (k', omega') = boost(v)(k, omega)
/// where (k, omega) = fields.at.
inline OhmResult generalized_ohm(const SpatialTensor3& sigma_primed, const Vec3& v,
                                 const FieldSet& fields, const UnitsConfig& units = {}) {
  const BoostParams p = BoostParams::make(v, units);
  require_dynamic(fields.at.omega);
  detail::require_faraday(fields);
  const CMat3 linv = p.spatial_inverse.cast<cplx>();
  const CVec3 drive = fields.e + cross(v, fields.b);
  const CVec3 drift = p.gamma * (linv * sigma_primed * linv * drive);
  return split_drift(drift, v, fields.at);
}

/// j - rho v = gamma sigma' (E - v (v.E) / c^2 + v x B).
inline CVec3 textbook_ohm(cplx sigma_scalar, const Vec3& v, const FieldSet& fields,
                          const UnitsConfig& units = {}) {
  const BoostParams p = BoostParams::make(v, units);
  const CVec3 vc = v.cast<cplx>();
  const CVec3 projected = vc * (vc.dot(fields.e) / (units.c * units.c));
  return (p.gamma * sigma_scalar) * (fields.e - projected + cross(v, fields.b));
}

/// j - rho v = sigma' (E + v x B).
inline CVec3 textbook_ohm_nr(cplx sigma_scalar, const Vec3& v, const FieldSet& fields) {
  return sigma_scalar * (fields.e + cross(v, fields.b));
}

}  // namespace relohm

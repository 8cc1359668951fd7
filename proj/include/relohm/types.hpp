// SPDX-License-Identifier: Apache-2.0
#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <string>

#include <Eigen/Dense>

#include "relohm/errors.hpp"

namespace relohm {

using cplx = std::complex<double>;

using Vec3 = Eigen::Vector3d;
using Vec4 = Eigen::Vector4d;
using Mat3 = Eigen::Matrix3d;
using Mat4 = Eigen::Matrix4d;
using CVec3 = Eigen::Vector3cd;
using CVec4 = Eigen::Vector4cd;
using CMat3 = Eigen::Matrix3cd;
using CMat4 = Eigen::Matrix4cd;

/// Complex 3x3 Cartesian tensor at a single (k, omega): holds either the
/// conductivity sigma_kl or the spatial block chi_kl of the response tensor.
using SpatialTensor3 = CMat3;

inline constexpr cplx I{0.0, 1.0};

inline std::string format_real(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

/// Unit system. Only the speed of light is configurable; the default c = 1
/// keeps laboratory-style numbers of order one.
struct UnitsConfig {
  double c = 1.0;

  UnitsConfig() = default;
  explicit UnitsConfig(double speed_of_light) : c(speed_of_light) {
    if (!(std::isfinite(c) && c > 0.0)) {
      throw ConfigError("speed of light must be positive and finite, got " +
                        format_real(c));
    }
  }

  static UnitsConfig si() { return UnitsConfig(299792458.0); }
};

/// Sample point (k, omega). The contravariant four-vector is
/// k^mu = (omega / c, k).
struct Wavevector4 {
  double omega = 0.0;
  Vec3 k = Vec3::Zero();

  bool operator==(const Wavevector4& o) const {
    return omega == o.omega && k == o.k;
  }
  bool operator!=(const Wavevector4& o) const { return !(*this == o); }

  [[nodiscard]] Vec4 contravariant(const UnitsConfig& u) const {
    return {omega / u.c, k.x(), k.y(), k.z()};
  }
  [[nodiscard]] Vec4 covariant(const UnitsConfig& u) const {
    return {-omega / u.c, k.x(), k.y(), k.z()};
  }
  static Wavevector4 from_contravariant(const Vec4& kmu, const UnitsConfig& u) {
    return {kmu(0) * u.c, kmu.tail<3>()};
  }

  [[nodiscard]] bool finite() const { return std::isfinite(omega) && k.allFinite(); }
};

/// Largest absolute entry; the norm used for every residual in the library.
template <typename Derived>
double max_abs(const Eigen::MatrixBase<Derived>& m) {
  if (m.size() == 0) return 0.0;
  return m.cwiseAbs().maxCoeff();
}

/// max |a - b| / max(max|a|, max|b|, floor).
template <typename A, typename B>
double relative_error(const Eigen::MatrixBase<A>& a, const Eigen::MatrixBase<B>& b,
                      double floor = 1e-14) {
  const double scale = std::max({max_abs(a), max_abs(b), floor});
  return max_abs(a - b) / scale;
}

/// Compact "%.6g" rendering for diagnostics.
inline std::string describe(const Wavevector4& kw) {
  char buf[160];
  std::snprintf(buf, sizeof buf, "(omega=%.10g, k=[%.10g, %.10g, %.10g])", kw.omega,
                kw.k.x(), kw.k.y(), kw.k.z());
  return buf;
}

}  // namespace relohm

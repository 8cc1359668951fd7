// SPDX-License-Identifier: Apache-2.0
//
// Minkowski geometry with signature eta = diag(-1, 1, 1, 1) and the
// Lorentz group O(1,3): boosts, rotations, discrete factors, composition,
// inversion and the rotation/boost factorization.
//
// LorentzMatrix stores Lambda^mu_nu acting on contravariant vectors
// x^mu = (c t, x). Index lowering is always explicit through metric().
#pragma once

#include <string>

#include "relohm/types.hpp"

namespace relohm {

inline const Mat4& metric() {
  static const Mat4 eta = Vec4(-1.0, 1.0, 1.0, 1.0).asDiagonal();
  return eta;
}

/// Largest admissible |v| / c; keeps gamma finite in double precision.
inline constexpr double kMaxBeta = 1.0 - 1e-12;

/// Velocity-parameterized boost data: gamma and the spatial block
/// 1 + (gamma - 1) v v^T / |v|^2.
struct BoostParams {
  Vec3 v = Vec3::Zero();
  double gamma = 1.0;
  Mat3 spatial = Mat3::Identity();

  /// Inverse of the spatial block, 1 + (1/gamma - 1) v v^T / |v|^2.
  Mat3 spatial_inverse = Mat3::Identity();

  static BoostParams make(const Vec3& v, const UnitsConfig& units) {
    if (!v.allFinite()) throw SpeedLimit("boost velocity is not finite");
    const double beta = v.norm() / units.c;
    if (beta > kMaxBeta) {
      throw SpeedLimit("|v| / c = " + format_real(beta) +
                       " is not below the speed limit 1 - 1e-12");
    }
    BoostParams p;
    p.v = v;
    p.gamma = 1.0 / std::sqrt((1.0 - beta) * (1.0 + beta));
    // (gamma - 1) / |v|^2 = gamma^2 / ((gamma + 1) c^2); finite at v = 0.
    const double c2 = units.c * units.c;
    const Mat3 vvT = v * v.transpose();
    if (beta == 0.0) {
      p.spatial = Mat3::Identity();
      p.spatial_inverse = Mat3::Identity();
    } else {
      p.spatial = Mat3::Identity() + (p.gamma * p.gamma / ((p.gamma + 1.0) * c2)) * vvT;
      p.spatial_inverse = Mat3::Identity() - (p.gamma / ((p.gamma + 1.0) * c2)) * vvT;
    }
    return p;
  }
};

/// A real 4x4 element of O(1,3). Group membership is checked on
/// construction, so every instance satisfies Lambda^T eta Lambda = eta.
class LorentzMatrix {
public:
  /// Absolute tolerance on ||Lambda^T eta Lambda - eta||_max for a
  /// unit-scale matrix; scaled by max(1, ||Lambda||_max^2) otherwise.
  static constexpr double kTolerance = 1e-12;

  LorentzMatrix() : m_(Mat4::Identity()) {}

  static LorentzMatrix identity() { return {}; }

  static LorentzMatrix from_matrix(const Mat4& m) {
    if (!m.allFinite()) throw NotLorentz("Lorentz matrix has non-finite entries");
    const double residual = metric_residual(m);
    if (residual > tolerance_for(m)) {
      throw NotLorentz("matrix is not in O(1,3): ||L^T eta L - eta||_max = " +
                       format_real(residual));
    }
    return LorentzMatrix(m);
  }

  static double metric_residual(const Mat4& m) {
    return max_abs(Mat4(m.transpose() * metric() * m - metric()));
  }

  static double tolerance_for(const Mat4& m) {
    const double s = max_abs(m);
    return kTolerance * std::max(1.0, s * s);
  }

  [[nodiscard]] const Mat4& matrix() const { return m_; }
  double operator()(int row, int col) const { return m_(row, col); }

  [[nodiscard]] Mat3 spatial_block() const { return m_.bottomRightCorner<3, 3>(); }

  [[nodiscard]] bool proper() const { return m_.determinant() > 0.0; }
  [[nodiscard]] bool orthochronous() const { return m_(0, 0) >= 1.0 - 1e-12; }

  /// Lambda x for a contravariant (real or complex) four-vector.
  template <typename Scalar>
  [[nodiscard]] Eigen::Matrix<Scalar, 4, 1> apply(const Eigen::Matrix<Scalar, 4, 1>& x) const {
    return m_.cast<Scalar>() * x;
  }

private:
  explicit LorentzMatrix(const Mat4& m) : m_(m) {}
  Mat4 m_;
};

/// Boost into the frame moving with velocity v:
///   (gamma, -gamma v^T / c; -gamma v / c, spatial block).
inline LorentzMatrix boost_matrix(const BoostParams& p, const UnitsConfig& units) {
  Mat4 m;
  m(0, 0) = p.gamma;
  m.block<1, 3>(0, 1) = (-p.gamma / units.c) * p.v.transpose();
  m.block<3, 1>(1, 0) = (-p.gamma / units.c) * p.v;
  m.bottomRightCorner<3, 3>() = p.spatial;
  return LorentzMatrix::from_matrix(m);
}

inline LorentzMatrix boost_matrix(const Vec3& v, const UnitsConfig& units = {}) {
  return boost_matrix(BoostParams::make(v, units), units);
}

inline void require_orthogonal(const Mat3& r) {
  if (!r.allFinite()) throw NotOrthogonal("rotation has non-finite entries");
  const double residual = max_abs(Mat3(r.transpose() * r - Mat3::Identity()));
  if (residual > 1e-10) {
    throw NotOrthogonal("||R^T R - 1||_max = " + format_real(residual) + " exceeds 1e-10");
  }
}

/// Block-diagonal embedding diag(1, R) of an O(3) element.
inline LorentzMatrix rotation_embed(const Mat3& r) {
  require_orthogonal(r);
  Mat4 m = Mat4::Identity();
  m.bottomRightCorner<3, 3>() = r;
  return LorentzMatrix::from_matrix(m);
}

inline LorentzMatrix time_reversal() {
  return LorentzMatrix::from_matrix(Vec4(-1.0, 1.0, 1.0, 1.0).asDiagonal());
}

inline LorentzMatrix parity() {
  return LorentzMatrix::from_matrix(Vec4(1.0, -1.0, -1.0, -1.0).asDiagonal());
}

inline LorentzMatrix compose(const LorentzMatrix& a, const LorentzMatrix& b) {
  return LorentzMatrix::from_matrix(a.matrix() * b.matrix());
}

/// Lambda^{-1} = eta Lambda^T eta (exact, no factorization).
inline LorentzMatrix inverse(const LorentzMatrix& l) {
  return LorentzMatrix::from_matrix(metric() * l.matrix().transpose() * metric());
}

/// k'^mu = Lambda^mu_nu k^nu applied to k^nu = (omega / c, k).
inline Wavevector4 transform_wavevector(const LorentzMatrix& l, const Wavevector4& kw,
                                        const UnitsConfig& units = {}) {
  return Wavevector4::from_contravariant(l.apply(kw.contravariant(units)), units);
}

/// -omega^2 / c^2 + |k|^2.
inline double minkowski_norm(const Wavevector4& kw, const UnitsConfig& units = {}) {
  const double t = kw.omega / units.c;
  return -t * t + kw.k.squaredNorm();
}

/// Factorization Lambda = T^time_reversal * P^parity * boost(v) * diag(1, R)
/// with T = diag(-1, 1, 1, 1) and P = diag(1, -1, -1, -1). Exponents are 0 or 1.
struct Decomposition {
  Mat3 rotation = Mat3::Identity();
  Vec3 velocity = Vec3::Zero();
  int parity = 0;
  int time_reversal = 0;
};

inline Decomposition decompose(const LorentzMatrix& l, const UnitsConfig& units = {}) {
  Mat4 m = l.matrix();
  Decomposition d;
  if (m(0, 0) < 0.0) {
    d.time_reversal = 1;
    m.row(0) *= -1.0;
  }
  if (m.determinant() < 0.0) {
    d.parity = 1;
    m.bottomRows<3>() *= -1.0;
  }
  const double gamma = m(0, 0);
  // The time column of the proper orthochronous part is (gamma, -gamma v / c).
  Vec3 v = (-units.c / gamma) * m.block<3, 1>(1, 0);
  if (!std::isfinite(gamma) || !v.allFinite() || v.norm() / units.c > kMaxBeta) {
    throw DegenerateDecomposition("cannot extract a boost velocity: Lambda^0_0 = " +
                                  format_real(gamma));
  }
  d.velocity = v;
  const LorentzMatrix proper_part = LorentzMatrix::from_matrix(m);
  const Mat4 rot = inverse(boost_matrix(v, units)).matrix() * proper_part.matrix();
  d.rotation = rot.bottomRightCorner<3, 3>();
  return d;
}

inline LorentzMatrix recompose(const Decomposition& d, const UnitsConfig& units = {}) {
  LorentzMatrix out = compose(boost_matrix(d.velocity, units), rotation_embed(d.rotation));
  if (d.parity) out = compose(parity(), out);
  if (d.time_reversal) out = compose(time_reversal(), out);
  return out;
}

}  // namespace relohm

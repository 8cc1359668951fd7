// SPDX-License-Identifier: Apache-2.0
//
// Seeded random configurations for property checks:
//   sigma entries: re, im ~ U[-1, 1]
//   omega ~ U[0.1, 10], |k| ~ U[0, 5], |v| / c ~ U[0, 0.9]
// with isotropic directions. Boost cases falling within the resonance guard
// are redrawn.
#pragma once

#include <cstdint>
#include <random>

#include "relohm/transform.hpp"

namespace relohm {

class Sampler {
public:
  explicit Sampler(std::uint64_t seed, UnitsConfig units = {}) : rng_(seed), units_(units) {}

  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng_); }

  cplx complex_unit() { return {uniform(-1.0, 1.0), uniform(-1.0, 1.0)}; }

  CVec3 cvec3() { return {complex_unit(), complex_unit(), complex_unit()}; }

  SpatialTensor3 sigma() {
    SpatialTensor3 m;
    for (int i = 0; i < 9; ++i) m(i / 3, i % 3) = complex_unit();
    return m;
  }

  double omega() { return uniform(0.1, 10.0); }

  Vec3 direction() {
    std::normal_distribution<double> n;
    Vec3 d;
    do {
      d = Vec3(n(rng_), n(rng_), n(rng_));
    } while (d.norm() < 1e-8);
    return d.normalized();
  }

  Vec3 wavevector(double max_norm = 5.0) { return uniform(0.0, max_norm) * direction(); }

  Vec3 velocity(double max_beta = 0.9) { return (units_.c * uniform(0.0, max_beta)) * direction(); }

  Wavevector4 point() { return {omega(), wavevector()}; }

  /// Uniformly distributed proper rotation (normalized random quaternion).
  Mat3 rotation() {
    std::normal_distribution<double> n;
    Eigen::Quaterniond q;
    do {
      q = Eigen::Quaterniond(n(rng_), n(rng_), n(rng_), n(rng_));
    } while (q.norm() < 1e-8);
    return q.normalized().toRotationMatrix();
  }

  struct BoostCase {
    FrameSample sample;
    Vec3 v;
  };

  BoostCase boost_case(double max_beta = 0.9) {
    for (;;) {
      BoostCase bc{{sigma(), point()}, velocity(max_beta)};
      const double vk = bc.v.dot(bc.sample.at.k);
      const double w = bc.sample.at.omega;
      if (std::abs(w - vk) > kResonanceRelTol * std::max(std::abs(w), std::abs(vk))) return bc;
    }
  }

  [[nodiscard]] const UnitsConfig& units() const { return units_; }
  std::mt19937_64& engine() { return rng_; }

private:
  std::mt19937_64 rng_;
  UnitsConfig units_;
};

}  // namespace relohm

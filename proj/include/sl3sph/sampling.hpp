#pragma once

#include <cstdint>
#include <random>
#include <vector>

#include "sl3sph/group.hpp"

// Deterministic sample generators. Halton points drive quasi-uniform coverage
// of the rotation group; the Gaussian helpers are hand-rolled Box-Muller so
// streams are identical across standard libraries for a fixed seed.
namespace sl3sph {

inline double halton(std::uint64_t i, std::uint64_t base) {
  double f = 1.0, r = 0.0;
  for (std::uint64_t n = i + 1; n > 0; n /= base) {
    f /= static_cast<double>(base);
    r += f * static_cast<double>(n % base);
  }
  return r;
}

// Low-discrepancy rotation: Euler alpha, gamma uniform, cos(beta) uniform.
inline Rotation halton_rotation(std::uint64_t i) {
  const double two_pi = 2.0 * std::acos(-1.0);
  double alpha = two_pi * halton(i, 2);
  double u = 2.0 * halton(i, 3) - 1.0;
  double gamma = two_pi * halton(i, 5);
  double beta = std::acos(std::min(1.0, std::max(-1.0, u)));
  return rotation_from_euler(alpha, beta, gamma);
}

inline std::vector<Rotation> halton_rotations(std::size_t count, std::uint64_t offset = 0) {
  std::vector<Rotation> out;
  out.reserve(count);
  for (std::size_t i = 0; i < count; ++i) out.push_back(halton_rotation(offset + i));
  return out;
}

class GaussianSampler {
 public:
  explicit GaussianSampler(std::uint64_t seed) : rng_(seed) {}

  double uniform() {
    // 53-bit mantissa uniform in [0, 1).
    return (rng_() >> 11) * 0x1.0p-53;
  }
  double normal() {
    if (have_spare_) {
      have_spare_ = false;
      return spare_;
    }
    double u1 = 0.0;
    do {
      u1 = uniform();
    } while (u1 <= 0.0);
    double u2 = uniform();
    const double two_pi = 2.0 * std::acos(-1.0);
    double r = std::sqrt(-2.0 * std::log(u1));
    spare_ = r * std::sin(two_pi * u2);
    have_spare_ = true;
    return r * std::cos(two_pi * u2);
  }

  // Symmetric traceless matrix with Killing norm at most max_norm, radially
  // distributed so samples fill the ball rather than its boundary.
  Mat3 symmetric_traceless(double max_norm) {
    Mat3 y;
    for (int i = 0; i < 3; ++i) y.m[i][i] = normal();
    double t = trace(y) / 3.0;
    for (int i = 0; i < 3; ++i) y.m[i][i] -= t;
    for (int i = 0; i < 3; ++i)
      for (int j = i + 1; j < 3; ++j) y.m[i][j] = y.m[j][i] = normal();
    double n = lie_norm(y);
    if (n < 1e-12) return symmetric_traceless(max_norm);
    double radius = max_norm * std::pow(uniform(), 0.2);
    return (radius / n) * y;
  }

  CartanVector cartan_vector(double max_norm) {
    CartanVector v = CartanVector::project(normal(), normal(), normal());
    double n = lie_norm(v);
    if (n < 1e-12) return cartan_vector(max_norm);
    return (max_norm * std::pow(uniform(), 0.5) / n) * v;
  }

  Rotation rotation() {
    const double two_pi = 2.0 * std::acos(-1.0);
    double alpha = two_pi * uniform();
    double u = 2.0 * uniform() - 1.0;
    double gamma = two_pi * uniform();
    return rotation_from_euler(alpha, std::acos(std::min(1.0, std::max(-1.0, u))), gamma);
  }

 private:
  std::mt19937_64 rng_;
  bool have_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace sl3sph

#pragma once

#include "cfisac/common.hpp"

#include <cstdint>
#include <random>
#include <string_view>

namespace cfisac {

/// Seeded random stream. Child streams are derived from the parent seed and a
/// name (or index), so every consumer owns an independent, reproducible stream
/// regardless of the order in which streams are created.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : seed_(seed), engine_(mix(seed)) {}

  std::uint64_t seed() const { return seed_; }

  Rng child(std::string_view name) const { return Rng(mix(seed_ ^ fnv1a(name))); }
  Rng child(std::uint64_t index) const { return Rng(mix(seed_ + 0x9e3779b97f4a7c15ULL * (index + 1))); }

  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return normal_(engine_); }

  /// Circularly-symmetric complex Gaussian with unit variance.
  cdouble cnormal() {
    constexpr double kHalf = 0.70710678118654752440;
    const double re = normal();
    const double im = normal();
    return {kHalf * re, kHalf * im};
  }

  CVector cnormal_vector(Eigen::Index n) {
    CVector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v(i) = cnormal();
    return v;
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  static std::uint64_t mix(std::uint64_t x) {
    // splitmix64 finalizer
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
  }
  static std::uint64_t fnv1a(std::string_view s) {
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : s) {
      h ^= c;
      h *= 0x100000001b3ULL;
    }
    return h;
  }

  std::uint64_t seed_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

/// Draw from CN(0, cov) given a square-root factor L with L L^H = cov.
inline CVector sample_cn(const CMatrix& sqrt_cov, Rng& rng) {
  return sqrt_cov * rng.cnormal_vector(sqrt_cov.cols());
}

/// Hermitian PSD square root via eigendecomposition; tiny negative
/// eigenvalues are clipped to zero.
inline CMatrix psd_sqrt(const CMatrix& a) {
  Eigen::SelfAdjointEigenSolver<CMatrix> es(hermitian_part(a));
  RVector ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().adjoint();
}

}  // namespace cfisac

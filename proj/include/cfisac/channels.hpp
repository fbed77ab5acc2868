#pragma once

#include "cfisac/common.hpp"
#include "cfisac/rng.hpp"
#include "cfisac/scenario.hpp"

#include <vector>

namespace cfisac {

struct EstimationMatrices;

/// Spatial correlation C_{k,m} of the NLOS access channels. Entries for
/// receive APs are empty matrices.
struct SpatialCorrelation {
  int K = 0;
  int M = 0;
  std::vector<CMatrix> C;       // row-major over (k, m)
  std::vector<CMatrix> sqrt_C;  // Hermitian square roots, for sampling
  RMatrix gain;                 // K x M large-scale gains

  const CMatrix& operator()(int k, int m) const { return C[k * M + m]; }
  const CMatrix& sqrt_of(int k, int m) const { return sqrt_C[k * M + m]; }
};

/// Gaussian local-scattering correlation for a half-wavelength ULA:
/// [R]_{l,n} = E_delta[exp(j pi (l-n) sin(az + delta) cos(el))], delta ~ N(0, spread^2).
/// Evaluated with Gauss-Hermite quadrature; spread = 0 gives a a^H.
CMatrix local_scattering_correlation(double azimuth, double elevation, double spread_rad, int N);

SpatialCorrelation build_correlation(const Scenario& scenario);

/// Target two-hop geometry. Steering vectors are stored per (region, AP) so
/// that A_{i,m,m'} = a_m a_{m'}^H can be formed on demand.
struct TargetGeometry {
  int S = 0;
  int M = 0;
  int N = 0;
  std::vector<RMatrix> beta;              // per region, M x M: beta(rx m, tx m')
  std::vector<std::vector<CVector>> steer;  // steer[i][m] = a_m(phi_{m,i}, theta_{m,i})
  std::vector<CMatrix> rcs_cov;           // per region, |M^tx| x |M^tx| in tx-index order
  std::vector<CMatrix> rcs_sqrt;

  CMatrix A(int i, int m, int m_prime) const { return steer[i][m] * steer[i][m_prime].adjoint(); }
  /// RCS covariance R_{i,m}; identical for every receive AP m of region i.
  const CMatrix& R(int i, int /*m*/) const { return rcs_cov[i]; }
};

/// Gaussian angular-view kernel of the RCS seen from `cell` across the given
/// transmit APs. Separation is measured as the chord between unit direction
/// vectors, which keeps the kernel positive semidefinite; tiny negative
/// eigenvalues are clipped.
CMatrix rcs_covariance(const Vec3& cell, const std::vector<Vec3>& tx_positions, double variance, double width_rad);

TargetGeometry build_target_geometry(const Scenario& scenario);

struct ChannelRealization {
  int K = 0;
  int M = 0;
  std::vector<CVector> h;      // (k, m) row-major; empty for receive APs
  std::vector<CVector> h_hat;  // MMSE estimates
  std::vector<std::vector<CVector>> alpha;  // alpha[i][m] for receive APs m, length |M^tx|
  std::vector<bool> target_present;

  const CVector& channel(int k, int m) const { return h[k * M + m]; }
  const CVector& estimate(int k, int m) const { return h_hat[k * M + m]; }
};

/// Draws channel, estimate and RCS realizations for one coherence block.
/// Estimates are formed through the pilot observation model, so copilot
/// estimates are correlated exactly as in uplink training.
class ChannelSampler {
 public:
  /// Throws NumericalError if some C_{k,m} - Phi_{k,m} is not PSD.
  ChannelSampler(const Scenario& scenario, const SpatialCorrelation& corr, const EstimationMatrices& est,
                 const TargetGeometry& geom);

  ChannelRealization sample(const std::vector<bool>& target_present, Rng& rng) const;

  /// Access channels and estimates only; leaves alpha empty.
  void sample_access(ChannelRealization& out, Rng& rng) const;

 private:
  const Scenario& sc_;
  const SpatialCorrelation& corr_;
  const EstimationMatrices& est_;
  const TargetGeometry& geom_;
};

inline ChannelRealization sample_realization(const Scenario& scenario, const SpatialCorrelation& corr,
                                             const EstimationMatrices& est, const TargetGeometry& geom,
                                             const std::vector<bool>& target_present, Rng& rng) {
  return ChannelSampler(scenario, corr, est, geom).sample(target_present, rng);
}

}  // namespace cfisac

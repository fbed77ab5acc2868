#pragma once

#include "cfisac/channels.hpp"
#include "cfisac/comm_metrics.hpp"
#include "cfisac/common.hpp"
#include "cfisac/estimation.hpp"
#include "cfisac/rng.hpp"
#include "cfisac/scenario.hpp"

#include <vector>

namespace cfisac {

/// Transmit signals s_{m}[t] of every transmit AP over tau_s sensing symbols.
struct TransmitSignals {
  std::vector<CMatrix> s;  // per tx index, N x tau_s
  int tau_s = 0;
};

/// Builds s_m[t] from MRT precoders of the realization's estimates and
/// unit-norm beams toward the drop's radar cells. Data symbols x_k[t] are
/// shared by all APs serving UE k; sensing symbols are independent per AP.
TransmitSignals generate_transmit_signals(const Scenario& sc, const EstimationMatrices& est,
                                          const PowerAllocation& alloc, const ChannelRealization& real, int tau_s,
                                          Rng& rng);

/// Stacked target channel D_ddot_{i,m} (N tau_s x |M^tx|) at receive AP m:
/// column m' stacks sqrt(beta_{i,m,m'}) A_{i,m,m'} s_{m'}[t] over t.
CMatrix target_channel(const Scenario& sc, const TargetGeometry& geom, const TransmitSignals& tx, int region,
                       int rx_ap);

/// y_ddot = present * D_ddot alpha + z, z ~ CN(0, noise_power I).
CVector synthesize_observation(const CMatrix& D, const CVector& alpha, bool present, double noise_power, Rng& rng);

/// Whitened subspace data for the GLRT of one region. Noise is white after
/// AP-AP cancellation, so Psi^{-1/2} = I / sigma_z.
struct GlrtWorkspace {
  double noise_power = 0;
  std::vector<CMatrix> U;   // per receive AP of the region, orthonormal columns
  std::vector<CMatrix> Xi;  // U^H Psi^{-1/2} D_ddot
  std::vector<int> rank;    // r_{i,m}
  int total_rank = 0;       // r_i
};

/// Singular values below rank_tol * largest are treated as zero.
GlrtWorkspace build_glrt_workspace(const std::vector<CMatrix>& D_per_rx, double noise_power,
                                   double rank_tol = 1e-10);

/// T_i = sum_m || U^H Psi^{-1/2} y ||^2. Gamma(r_i, 1) distributed under H0.
double glrt_statistic(const std::vector<CVector>& observations, const GlrtWorkspace& ws);

/// Upper p_fa quantile of Gamma(rank, 1); p_fa = 1 yields 0.
double glrt_threshold(int rank, double p_fa);

/// gamma_p = (1/r_i) sum_m tr(Xi R Xi^H).
double receive_snr(const GlrtWorkspace& ws, const CMatrix& rcs_cov);

/// Per-(region, transmit AP) matrices F_bar_{i,m} of size (K+S) x (K+S),
/// ordered (zeta_{1..K,m}, nu_{1..S,m}). The second-moment derivation makes
/// them real diagonal; see docs/effective_snr.md.
struct SensingQuadratic {
  int region = 0;
  int tau_s = 0;
  std::vector<RMatrix> F;  // per tx index
  double normalizer = 0;   // N tau_s sigma_z^2
};

SensingQuadratic effective_snr_matrices(const Scenario& sc, const TargetGeometry& geom, const EstimationMatrices& est,
                                        int region, int tau_s, double noise_power);

std::vector<SensingQuadratic> effective_snr_matrices(const Scenario& sc, const TargetGeometry& geom,
                                                     const EstimationMatrices& est, int tau_s, double noise_power);

/// sum_m b_m^T F_bar_{i,m} b_m (not normalised).
double sensing_energy(const SensingQuadratic& q, const RVector& b);

struct EffectiveSnr {
  double snr = 0;   // gamma_bar_i
  double rate = 0;  // R_bar_i, bit/s
};

/// R_bar = fraction * B * log2(1 + snr), fraction = tau_s / tau_c.
double sensing_rate(double snr, double fraction, double bandwidth);

EffectiveSnr effective_snr(const Scenario& sc, const PowerAllocation& alloc, const SensingQuadratic& q);
RVector effective_snrs(const Scenario& sc, const PowerAllocation& alloc, const std::vector<SensingQuadratic>& q);

}  // namespace cfisac

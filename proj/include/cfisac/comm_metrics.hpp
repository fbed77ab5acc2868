#pragma once

#include "cfisac/channels.hpp"
#include "cfisac/common.hpp"
#include "cfisac/estimation.hpp"
#include "cfisac/rng.hpp"
#include "cfisac/scenario.hpp"

#include <vector>

namespace cfisac {

/// Amplitude coefficients zeta_{k,m} = sqrt(eta_{k,m}) and nu_{i,m} = sqrt(mu_{i,m}).
/// Entries outside the serving sets M_k and beam sets S_m are structural zeros.
struct PowerAllocation {
  RMatrix zeta;  // K x M
  RMatrix nu;    // S x M

  static PowerAllocation zeros(const Scenario& sc);

  /// Per-AP power sum_k zeta^2 + sum_i nu^2.
  double ap_power(int m) const { return zeta.col(m).squaredNorm() + nu.col(m).squaredNorm(); }

  /// Stacked vector b = [b_{m_1}; ...; b_{m_T}] over transmit APs with
  /// b_m = (zeta_{1..K,m}, nu_{1..S,m}).
  RVector stacked(const Scenario& sc) const;
  static PowerAllocation from_stacked(const Scenario& sc, const RVector& b);

  bool respects_structure(const Scenario& sc) const;
  bool within_budget(const Scenario& sc, double slack = 0.0) const;
};

/// W_{i,m} for every region i and transmit AP m (empty for receive APs).
struct SensingBeamCovariance {
  int S = 0;
  int M = 0;
  std::vector<CMatrix> W;
  const CMatrix& operator()(int i, int m) const { return W[i * M + m]; }
};

/// Uniform draw from the long-term distribution of inspected positions in a region.
Vec3 sample_inspected_position(const Scenario& sc, int region, Rng& rng);

/// Monte Carlo average of w_0 w_0^H over n_mc inspected positions of region i.
CMatrix sensing_beam_covariance(const Scenario& sc, int region, int ap, int n_mc, Rng& rng);

SensingBeamCovariance build_beam_covariances(const Scenario& sc, Rng& rng);

/// Statistical coefficients of the SINR expression, precomputed once per drop.
/// All entries are exact functions of C, Lambda, Phi and W.
struct SinrTerms {
  int K = 0;
  int M = 0;
  int S = 0;
  double noise = 0;
  RMatrix useful;                       // K x M: sqrt(tr Phi_{k,m}), m in M_k
  std::vector<RMatrix> beamforming;     // [k](j, m): tr(C_{k,m} Phi_{j,m}) / tr Phi_{j,m}
  std::vector<CMatrix> contamination;   // [k](j, m): pilot overlap * tr(C_{k,m} Lambda_{j,m}) / sqrt(tr Phi_{j,m}), j != k
  std::vector<RMatrix> leakage;         // [k](i, m): tr(C_{k,m} W_{i,m}), i in S_m
};

SinrTerms build_sinr_terms(const Scenario& sc, const SpatialCorrelation& corr, const EstimationMatrices& est,
                           const SensingBeamCovariance& W, double noise_power);

struct SinrParts {
  double numerator = 0;
  double beamforming = 0;
  double contamination = 0;
  double leakage = 0;
  double noise = 0;
  double denominator() const { return beamforming + contamination + leakage + noise; }
  double sinr() const { return numerator / denominator(); }
};

SinrParts sinr_parts(const SinrTerms& terms, const PowerAllocation& alloc, int k, bool with_leakage = true);

/// Closed-form UatF SINR for every UE. `with_leakage = false` drops the
/// sensing-beam interference (orthogonal time sharing).
RVector closed_form_sinr(const SinrTerms& terms, const PowerAllocation& alloc, bool with_leakage = true);

/// ((tau_c - tau_p) / tau_c) * B * log2(1 + gamma), bit/s.
double achievable_rate(double gamma, int tau_c, int tau_p, double bandwidth);

/// Empirical UatF SINR from simulated coherence blocks: channels and
/// estimates are drawn through the pilot model, sensing beams point at
/// positions drawn from each region. Expectations over the unit-variance
/// data and sensing symbols are taken exactly.
RVector uatf_monte_carlo_oracle(const Scenario& sc, const SpatialCorrelation& corr, const EstimationMatrices& est,
                                const TargetGeometry& geom, const PowerAllocation& alloc, double noise_power,
                                long n_blocks, Rng& rng, bool with_leakage = true);

}  // namespace cfisac

#pragma once

#include "cfisac/channels.hpp"
#include "cfisac/common.hpp"

#include <vector>

namespace cfisac {

enum class PilotPolicy { RoundRobin };

/// Orthogonal pilot codebook of length tau_p; every sequence has squared
/// norm tau_p, so pi_j^H pi_k is tau_p for copilot UEs and 0 otherwise.
struct PilotAssignment {
  int tau_p = 0;
  std::vector<int> pilot_index;  // per UE, 0-based
  CMatrix codebook;              // tau_p x tau_p, column p is pi_p

  int K() const { return static_cast<int>(pilot_index.size()); }
  bool copilot(int j, int k) const { return pilot_index[j] == pilot_index[k]; }
  std::vector<int> copilots(int k) const;  // P_k, including k
  cdouble inner(int j, int k) const {
    return codebook.col(pilot_index[j]).dot(codebook.col(pilot_index[k]));
  }
  /// pi_j^H pi_k / tau_p: 1 for copilot UEs, 0 otherwise.
  double normalized_inner(int j, int k) const { return copilot(j, k) ? 1.0 : 0.0; }
};

PilotAssignment assign_pilots(int K, int tau_p, PilotPolicy policy = PilotPolicy::RoundRobin);

/// MMSE estimation matrices: Lambda_{k,m} = C_{k,m} (sum_{j in P_k} C_{j,m} + reg I)^{-1},
/// Phi_{k,m} = Lambda_{k,m} C_{k,m}, with reg = sigma_z^2 / (p_u tau_p).
struct EstimationMatrices {
  int K = 0;
  int M = 0;
  std::vector<CMatrix> Lambda;
  std::vector<CMatrix> Phi;
  RMatrix tr_Phi;  // K x M, zero for receive APs
  double regularizer = 0;
  PilotAssignment pilots;

  const CMatrix& lambda(int k, int m) const { return Lambda[k * M + m]; }
  const CMatrix& phi(int k, int m) const { return Phi[k * M + m]; }
};

EstimationMatrices build_estimation(const Scenario& scenario, const SpatialCorrelation& corr,
                                    const PilotAssignment& pilots, double pilot_power, double noise_power);

/// w = h_hat / sqrt(tr Phi), unit power on average.
CVector mrt_precoder(const CVector& h_hat, double tr_phi);

/// Unit-norm beam a_m(p) / sqrt(N) pointed from the array at `ap` to `cell`.
CVector sensing_beamformer(const Vec3& ap, const Vec3& cell, int N);

}  // namespace cfisac

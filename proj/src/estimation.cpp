#include "cfisac/estimation.hpp"

#include <string>

namespace cfisac {

std::vector<int> PilotAssignment::copilots(int k) const {
  std::vector<int> out;
  for (int j = 0; j < K(); ++j)
    if (pilot_index[j] == pilot_index[k]) out.push_back(j);
  return out;
}

PilotAssignment assign_pilots(int K, int tau_p, PilotPolicy policy) {
  if (tau_p < 1) throw ConfigError("tau_p must be at least 1");
  PilotAssignment pa;
  pa.tau_p = tau_p;
  pa.pilot_index.resize(K);
  switch (policy) {
    case PilotPolicy::RoundRobin:
      for (int k = 0; k < K; ++k) pa.pilot_index[k] = k % tau_p;
      break;
  }
  // DFT codebook: orthogonal columns of squared norm tau_p.
  pa.codebook.resize(tau_p, tau_p);
  for (int t = 0; t < tau_p; ++t)
    for (int p = 0; p < tau_p; ++p) pa.codebook(t, p) = std::polar(1.0, -2.0 * kPi * p * t / tau_p);
  return pa;
}

EstimationMatrices build_estimation(const Scenario& sc, const SpatialCorrelation& corr,
                                    const PilotAssignment& pilots, double pilot_power, double noise_power) {
  if (pilots.K() != corr.K) throw ConfigError("pilot assignment does not match the number of UEs");
  const int K = corr.K;
  const int M = corr.M;
  const int N = sc.config.N;
  EstimationMatrices est;
  est.K = K;
  est.M = M;
  est.Lambda.assign(K * M, CMatrix());
  est.Phi.assign(K * M, CMatrix());
  est.tr_Phi = RMatrix::Zero(K, M);
  est.regularizer = noise_power / (pilot_power * pilots.tau_p);
  est.pilots = pilots;

  const CMatrix I = CMatrix::Identity(N, N);
  for (int m : sc.tx_aps) {
    for (int k = 0; k < K; ++k) {
      CMatrix psi = est.regularizer * I;
      for (int j : pilots.copilots(k)) psi += corr(j, m);
      psi = hermitian_part(psi);
      Eigen::LDLT<CMatrix> ldlt(psi);
      CMatrix psi_inv = ldlt.solve(I);
      const double residual = (psi * psi_inv - I).norm();
      if (!(residual < 1e-8)) throw NumericalError("MMSE inversion residual " + std::to_string(residual));
      CMatrix lambda = corr(k, m) * psi_inv;
      CMatrix phi = hermitian_part(lambda * corr(k, m));
      est.tr_Phi(k, m) = phi.trace().real();
      est.Lambda[k * M + m] = std::move(lambda);
      est.Phi[k * M + m] = std::move(phi);
    }
  }
  return est;
}

CVector mrt_precoder(const CVector& h_hat, double tr_phi) {
  if (!(tr_phi > 0)) throw DomainError("MRT precoder on a degenerate link (tr Phi = 0)");
  return h_hat / std::sqrt(tr_phi);
}

CVector sensing_beamformer(const Vec3& ap, const Vec3& cell, int N) {
  return steering_vector(ap, cell, N) / std::sqrt(static_cast<double>(N));
}

}  // namespace cfisac

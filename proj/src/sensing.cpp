#include "cfisac/sensing.hpp"

#include <boost/math/special_functions/gamma.hpp>

namespace cfisac {

TransmitSignals generate_transmit_signals(const Scenario& sc, const EstimationMatrices& est,
                                          const PowerAllocation& alloc, const ChannelRealization& real, int tau_s,
                                          Rng& rng) {
  const int K = sc.config.K;
  const int N = sc.config.N;
  TransmitSignals tx;
  tx.tau_s = tau_s;
  CMatrix data(K, tau_s);
  for (int k = 0; k < K; ++k)
    for (int t = 0; t < tau_s; ++t) data(k, t) = rng.cnormal();

  for (int m : sc.tx_aps) {
    CMatrix s = CMatrix::Zero(N, tau_s);
    for (int k : sc.serving.ues_of_ap[m]) {
      if (alloc.zeta(k, m) == 0) continue;
      const CVector w = mrt_precoder(real.estimate(k, m), est.tr_Phi(k, m));
      s.noalias() += alloc.zeta(k, m) * w * data.row(k);
    }
    for (int i : sc.targets.regions_of_ap[m]) {
      const CVector w0 = sensing_beamformer(sc.ap_positions[m], sc.radar_cells[i], N);
      CVector x(tau_s);
      for (int t = 0; t < tau_s; ++t) x(t) = rng.cnormal();
      if (alloc.nu(i, m) == 0) continue;
      s.noalias() += alloc.nu(i, m) * w0 * x.transpose();
    }
    tx.s.push_back(std::move(s));
  }
  return tx;
}

CMatrix target_channel(const Scenario& sc, const TargetGeometry& geom, const TransmitSignals& tx, int region,
                       int rx_ap) {
  const int N = sc.config.N;
  const int T = sc.num_tx();
  CMatrix D(N * tx.tau_s, T);
  const CVector& a_rx = geom.steer[region][rx_ap];
  for (int c = 0; c < T; ++c) {
    const int mp = sc.tx_aps[c];
    const double amp = std::sqrt(geom.beta[region](rx_ap, mp));
    // a_{m'}^H s_{m'}[t] for every t
    const Eigen::RowVectorXcd proj = geom.steer[region][mp].adjoint() * tx.s[c];
    for (int t = 0; t < tx.tau_s; ++t) D.block(t * N, c, N, 1) = amp * proj(t) * a_rx;
  }
  return D;
}

CVector synthesize_observation(const CMatrix& D, const CVector& alpha, bool present, double noise_power, Rng& rng) {
  CVector y = std::sqrt(noise_power) * rng.cnormal_vector(D.rows());
  if (present) y += D * alpha;
  return y;
}

GlrtWorkspace build_glrt_workspace(const std::vector<CMatrix>& D_per_rx, double noise_power, double rank_tol) {
  GlrtWorkspace ws;
  ws.noise_power = noise_power;
  const double inv_sigma = 1.0 / std::sqrt(noise_power);
  for (const CMatrix& D : D_per_rx) {
    const CMatrix white = inv_sigma * D;
    Eigen::BDCSVD<CMatrix> svd(white, Eigen::ComputeThinU);
    const RVector& sv = svd.singularValues();
    int r = 0;
    if (sv.size() > 0 && sv(0) > 0)
      while (r < sv.size() && sv(r) > rank_tol * sv(0)) ++r;
    CMatrix U = svd.matrixU().leftCols(r);
    ws.Xi.push_back(U.adjoint() * white);
    ws.U.push_back(std::move(U));
    ws.rank.push_back(r);
    ws.total_rank += r;
  }
  return ws;
}

double glrt_statistic(const std::vector<CVector>& observations, const GlrtWorkspace& ws) {
  if (observations.size() != ws.U.size()) throw DomainError("GLRT observation count does not match the workspace");
  const double inv_sigma = 1.0 / std::sqrt(ws.noise_power);
  double T = 0;
  for (std::size_t m = 0; m < observations.size(); ++m)
    T += (ws.U[m].adjoint() * (inv_sigma * observations[m])).squaredNorm();
  return T;
}

double glrt_threshold(int rank, double p_fa) {
  if (!(p_fa > 0 && p_fa <= 1)) throw DomainError("false-alarm probability must lie in (0, 1]");
  if (rank < 1) throw NumericalError("GLRT threshold requested for a rank-zero subspace");
  if (p_fa == 1.0) return 0.0;
  return boost::math::gamma_q_inv(static_cast<double>(rank), p_fa);
}

double receive_snr(const GlrtWorkspace& ws, const CMatrix& rcs_cov) {
  if (ws.total_rank == 0) throw DomainError("receive SNR undefined: target subspace has rank zero");
  double acc = 0;
  for (const CMatrix& Xi : ws.Xi) acc += (Xi * rcs_cov * Xi.adjoint()).trace().real();
  return acc / ws.total_rank;
}

SensingQuadratic effective_snr_matrices(const Scenario& sc, const TargetGeometry& geom, const EstimationMatrices& est,
                                        int region, int tau_s, double noise_power) {
  const int K = sc.config.K;
  const int S = sc.config.S;
  const int N = sc.config.N;
  SensingQuadratic q;
  q.region = region;
  q.tau_s = tau_s;
  q.normalizer = N * tau_s * noise_power;
  const CMatrix& R = geom.rcs_cov[region];
  for (int c = 0; c < sc.num_tx(); ++c) {
    const int mp = sc.tx_aps[c];
    double echo = 0;  // tau_s * sum_rx ||a_rx||^2 beta R_{m'm'}
    for (int mr : sc.targets.rx_aps_of_region[region])
      echo += geom.steer[region][mr].squaredNorm() * geom.beta[region](mr, mp);
    echo *= tau_s * R(c, c).real();
    const CVector& a = geom.steer[region][mp];
    RMatrix F = RMatrix::Zero(K + S, K + S);
    for (int k : sc.serving.ues_of_ap[mp]) {
      const double trphi = est.tr_Phi(k, mp);
      if (!(trphi > 0)) continue;
      F(k, k) = echo * (a.adjoint() * est.phi(k, mp) * a)(0, 0).real() / trphi;
    }
    for (int i : sc.targets.regions_of_ap[mp]) {
      const CVector w0 = sensing_beamformer(sc.ap_positions[mp], sc.radar_cells[i], N);
      F(K + i, K + i) = echo * std::norm(a.dot(w0));
    }
    if ((F.diagonal().array() < 0).any()) throw NumericalError("effective-SNR matrix is not PSD");
    q.F.push_back(std::move(F));
  }
  return q;
}

std::vector<SensingQuadratic> effective_snr_matrices(const Scenario& sc, const TargetGeometry& geom,
                                                     const EstimationMatrices& est, int tau_s, double noise_power) {
  std::vector<SensingQuadratic> out;
  for (int i = 0; i < sc.config.S; ++i) out.push_back(effective_snr_matrices(sc, geom, est, i, tau_s, noise_power));
  return out;
}

double sensing_energy(const SensingQuadratic& q, const RVector& b) {
  const int T = static_cast<int>(q.F.size());
  const int L = T > 0 ? static_cast<int>(q.F[0].rows()) : 0;
  double e = 0;
  for (int c = 0; c < T; ++c) {
    const auto bm = b.segment(c * L, L);
    e += bm.dot(q.F[c] * bm);
  }
  return e;
}

double sensing_rate(double snr, double fraction, double bandwidth) {
  return fraction * bandwidth * std::log2(1.0 + snr);
}

EffectiveSnr effective_snr(const Scenario& sc, const PowerAllocation& alloc, const SensingQuadratic& q) {
  EffectiveSnr out;
  out.snr = sensing_energy(q, alloc.stacked(sc)) / q.normalizer;
  out.rate = sensing_rate(out.snr, static_cast<double>(q.tau_s) / sc.config.tau_c, sc.config.bandwidth);
  return out;
}

RVector effective_snrs(const Scenario& sc, const PowerAllocation& alloc, const std::vector<SensingQuadratic>& q) {
  RVector out(q.size());
  const RVector b = alloc.stacked(sc);
  for (std::size_t i = 0; i < q.size(); ++i) out(i) = sensing_energy(q[i], b) / q[i].normalizer;
  return out;
}

}  // namespace cfisac

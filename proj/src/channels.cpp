#include "cfisac/channels.hpp"

#include "cfisac/estimation.hpp"

#include <string>

namespace cfisac {

namespace {

struct HermiteRule {
  RVector nodes;
  RVector weights;  // normalised to sum to one for the N(0, 1/2) weight e^{-x^2}/sqrt(pi)
};

// Golub-Welsch for the physicists' Hermite weight.
const HermiteRule& hermite_rule() {
  static const HermiteRule rule = [] {
    constexpr int n = 64;
    RMatrix J = RMatrix::Zero(n, n);
    for (int i = 1; i < n; ++i) J(i, i - 1) = J(i - 1, i) = std::sqrt(i / 2.0);
    Eigen::SelfAdjointEigenSolver<RMatrix> es(J);
    HermiteRule r;
    r.nodes = es.eigenvalues();
    r.weights = es.eigenvectors().row(0).array().square().transpose();
    r.weights /= r.weights.sum();
    return r;
  }();
  return rule;
}

}  // namespace

CMatrix local_scattering_correlation(double azimuth, double elevation, double spread_rad, int N) {
  CMatrix R(N, N);
  const double ce = std::cos(elevation);
  if (spread_rad <= 0) {
    const CVector a = steering_vector(azimuth, elevation, N);
    return a * a.adjoint();
  }
  const HermiteRule& rule = hermite_rule();
  for (int d = 0; d < N; ++d) {
    cdouble acc = 0;
    for (Eigen::Index q = 0; q < rule.nodes.size(); ++q) {
      const double delta = std::sqrt(2.0) * spread_rad * rule.nodes(q);
      acc += rule.weights(q) * std::polar(1.0, kPi * d * std::sin(azimuth + delta) * ce);
    }
    for (int l = d; l < N; ++l) {
      R(l, l - d) = acc;
      R(l - d, l) = std::conj(acc);
    }
  }
  return R;
}

SpatialCorrelation build_correlation(const Scenario& sc) {
  SpatialCorrelation corr;
  corr.K = sc.config.K;
  corr.M = sc.config.M;
  corr.gain = access_gains(sc);
  corr.C.assign(corr.K * corr.M, CMatrix());
  corr.sqrt_C.assign(corr.K * corr.M, CMatrix());
  const double spread = sc.config.angular_spread_deg * kPi / 180.0;
  for (int k = 0; k < corr.K; ++k) {
    for (int m : sc.tx_aps) {
      const ViewAngles v = view_angles(sc.ap_positions[m], sc.ue_positions[k]);
      CMatrix C = corr.gain(k, m) * local_scattering_correlation(v.azimuth, v.elevation, spread, sc.config.N);
      corr.sqrt_C[k * corr.M + m] = psd_sqrt(C);
      corr.C[k * corr.M + m] = std::move(C);
    }
  }
  return corr;
}

CMatrix rcs_covariance(const Vec3& cell, const std::vector<Vec3>& tx_positions, double variance, double width_rad) {
  const int n = static_cast<int>(tx_positions.size());
  std::vector<Vec3> dirs;
  dirs.reserve(n);
  for (const Vec3& p : tx_positions) {
    const Vec3 d = p - cell;
    if (!(d.norm() > 0)) throw DomainError("target collocated with an AP");
    dirs.push_back(d.normalized());
  }
  RMatrix R(n, n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      const double sep = (dirs[a] - dirs[b]).norm();
      R(a, b) = variance * std::exp(-sep * sep / (2.0 * width_rad * width_rad));
    }
  Eigen::SelfAdjointEigenSolver<RMatrix> es(R);
  const double eps = 1e-9 * variance;
  if (es.eigenvalues().minCoeff() < -eps)
    throw NumericalError("RCS kernel matrix is not PSD within tolerance");
  if (es.eigenvalues().minCoeff() < 0) {
    RVector ev = es.eigenvalues().cwiseMax(0.0);
    R = es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
    R = 0.5 * (R + R.transpose());
  }
  return R.cast<cdouble>();
}

TargetGeometry build_target_geometry(const Scenario& sc) {
  TargetGeometry g;
  g.S = sc.config.S;
  g.M = sc.config.M;
  g.N = sc.config.N;
  const double fc = sc.config.carrier_frequency;
  std::vector<Vec3> tx_pos;
  for (int m : sc.tx_aps) tx_pos.push_back(sc.ap_positions[m]);
  for (int i = 0; i < g.S; ++i) {
    const Vec3& p = sc.radar_cells[i];
    RVector hop = RVector::Zero(g.M);
    std::vector<CVector> steer(g.M);
    for (int m = 0; m < g.M; ++m) {
      if (!((sc.ap_positions[m] - p).norm() > 0)) throw DomainError("target collocated with an AP");
      hop(m) = large_scale_gain(sc.ap_positions[m], p, LinkKind::LosTarget, fc);
      steer[m] = steering_vector(sc.ap_positions[m], p, g.N);
    }
    RMatrix beta = RMatrix::Zero(g.M, g.M);
    for (int m : sc.rx_aps)
      for (int mp : sc.tx_aps) beta(m, mp) = hop(mp) * hop(m);
    g.beta.push_back(std::move(beta));
    g.steer.push_back(std::move(steer));
    CMatrix R = rcs_covariance(p, tx_pos, sc.config.rcs_variance(), sc.config.rcs_view_width_deg * kPi / 180.0);
    g.rcs_sqrt.push_back(psd_sqrt(R));
    g.rcs_cov.push_back(std::move(R));
  }
  return g;
}

ChannelSampler::ChannelSampler(const Scenario& sc, const SpatialCorrelation& corr, const EstimationMatrices& est,
                               const TargetGeometry& geom)
    : sc_(sc), corr_(corr), est_(est), geom_(geom) {
  for (int k = 0; k < corr.K; ++k)
    for (int m : sc.tx_aps) {
      const CMatrix diff = hermitian_part(corr(k, m) - est.phi(k, m));
      const double tol = 1e-9 * std::max(corr(k, m).trace().real(), 1e-300);
      Eigen::SelfAdjointEigenSolver<CMatrix> es(diff, Eigen::EigenvaluesOnly);
      if (es.eigenvalues().minCoeff() < -tol)
        throw NumericalError("estimation error covariance C - Phi is not PSD for UE " + std::to_string(k) +
                             ", AP " + std::to_string(m));
    }
}

void ChannelSampler::sample_access(ChannelRealization& out, Rng& rng) const {
  const int K = corr_.K;
  const int M = corr_.M;
  const int N = sc_.config.N;
  out.K = K;
  out.M = M;
  out.h.assign(K * M, CVector());
  out.h_hat.assign(K * M, CVector());
  const double noise_sd = std::sqrt(est_.regularizer);
  const int tau_p = est_.pilots.tau_p;
  for (int m : sc_.tx_aps) {
    for (int k = 0; k < K; ++k) out.h[k * M + m] = sample_cn(corr_.sqrt_of(k, m), rng);
    // Despread pilot observation per pilot: sum of copilot channels plus noise.
    std::vector<CVector> observation(tau_p, CVector::Zero(N));
    for (int p = 0; p < tau_p; ++p) observation[p] = noise_sd * rng.cnormal_vector(N);
    for (int k = 0; k < K; ++k) observation[est_.pilots.pilot_index[k]] += out.h[k * M + m];
    for (int k = 0; k < K; ++k)
      out.h_hat[k * M + m] = est_.lambda(k, m) * observation[est_.pilots.pilot_index[k]];
  }
}

ChannelRealization ChannelSampler::sample(const std::vector<bool>& target_present, Rng& rng) const {
  ChannelRealization out;
  sample_access(out, rng);
  out.target_present = target_present;
  out.alpha.assign(geom_.S, std::vector<CVector>(geom_.M));
  for (int i = 0; i < geom_.S; ++i)
    for (int m : sc_.rx_aps) out.alpha[i][m] = sample_cn(geom_.rcs_sqrt[i], rng);
  return out;
}

}  // namespace cfisac

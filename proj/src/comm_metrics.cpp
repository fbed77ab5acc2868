#include "cfisac/comm_metrics.hpp"

#include <algorithm>

namespace cfisac {

PowerAllocation PowerAllocation::zeros(const Scenario& sc) {
  return {RMatrix::Zero(sc.config.K, sc.config.M), RMatrix::Zero(sc.config.S, sc.config.M)};
}

RVector PowerAllocation::stacked(const Scenario& sc) const {
  const int K = static_cast<int>(zeta.rows());
  const int S = static_cast<int>(nu.rows());
  RVector b(sc.num_tx() * (K + S));
  for (int t = 0; t < sc.num_tx(); ++t) {
    const int m = sc.tx_aps[t];
    b.segment(t * (K + S), K) = zeta.col(m);
    b.segment(t * (K + S) + K, S) = nu.col(m);
  }
  return b;
}

PowerAllocation PowerAllocation::from_stacked(const Scenario& sc, const RVector& b) {
  PowerAllocation a = zeros(sc);
  const int K = sc.config.K;
  const int S = sc.config.S;
  if (b.size() != sc.num_tx() * (K + S)) throw DomainError("stacked allocation has the wrong length");
  for (int t = 0; t < sc.num_tx(); ++t) {
    const int m = sc.tx_aps[t];
    a.zeta.col(m) = b.segment(t * (K + S), K);
    a.nu.col(m) = b.segment(t * (K + S) + K, S);
  }
  return a;
}

bool PowerAllocation::respects_structure(const Scenario& sc) const {
  if ((zeta.array() < 0).any() || (nu.array() < 0).any()) return false;
  for (int k = 0; k < zeta.rows(); ++k)
    for (int m = 0; m < zeta.cols(); ++m) {
      const auto& Mk = sc.serving.aps_of_ue[k];
      if (zeta(k, m) != 0 && std::find(Mk.begin(), Mk.end(), m) == Mk.end()) return false;
    }
  for (int i = 0; i < nu.rows(); ++i)
    for (int m = 0; m < nu.cols(); ++m) {
      const auto& Mp = sc.targets.tx_aps_of_region[i];
      if (nu(i, m) != 0 && std::find(Mp.begin(), Mp.end(), m) == Mp.end()) return false;
    }
  return true;
}

bool PowerAllocation::within_budget(const Scenario& sc, double slack) const {
  for (int m = 0; m < zeta.cols(); ++m)
    if (ap_power(m) > sc.power_budget[m] + slack) return false;
  return true;
}

Vec3 sample_inspected_position(const Scenario& sc, int region, Rng& rng) {
  const Region& r = sc.regions[region];
  const double x = rng.uniform(r.x_min, r.x_max);
  const double y = rng.uniform(r.y_min, r.y_max);
  const double z = rng.uniform(sc.config.target_height_min, sc.config.target_height_max);
  return {x, y, z};
}

CMatrix sensing_beam_covariance(const Scenario& sc, int region, int ap, int n_mc, Rng& rng) {
  const int N = sc.config.N;
  CMatrix W = CMatrix::Zero(N, N);
  for (int n = 0; n < n_mc; ++n) {
    const CVector w = sensing_beamformer(sc.ap_positions[ap], sample_inspected_position(sc, region, rng), N);
    W.noalias() += w * w.adjoint();
  }
  return W / static_cast<double>(n_mc);
}

SensingBeamCovariance build_beam_covariances(const Scenario& sc, Rng& rng) {
  SensingBeamCovariance cov;
  cov.S = sc.config.S;
  cov.M = sc.config.M;
  cov.W.assign(cov.S * cov.M, CMatrix());
  for (int i = 0; i < cov.S; ++i) {
    Rng stream = rng.child(static_cast<std::uint64_t>(i));
    for (int m : sc.tx_aps) cov.W[i * cov.M + m] = sensing_beam_covariance(sc, i, m, sc.config.beam_mc_positions, stream);
  }
  return cov;
}

SinrTerms build_sinr_terms(const Scenario& sc, const SpatialCorrelation& corr, const EstimationMatrices& est,
                           const SensingBeamCovariance& W, double noise_power) {
  SinrTerms t;
  t.K = sc.config.K;
  t.M = sc.config.M;
  t.S = sc.config.S;
  t.noise = noise_power;
  t.useful = RMatrix::Zero(t.K, t.M);
  for (int k = 0; k < t.K; ++k)
    for (int m : sc.serving.aps_of_ue[k]) t.useful(k, m) = std::sqrt(est.tr_Phi(k, m));

  t.beamforming.assign(t.K, RMatrix::Zero(t.K, t.M));
  t.contamination.assign(t.K, CMatrix::Zero(t.K, t.M));
  t.leakage.assign(t.K, RMatrix::Zero(t.S, t.M));
  for (int k = 0; k < t.K; ++k) {
    for (int j = 0; j < t.K; ++j) {
      const double overlap = est.pilots.normalized_inner(j, k);
      for (int m : sc.serving.aps_of_ue[j]) {
        const double trphi = est.tr_Phi(j, m);
        if (!(trphi > 0)) continue;
        t.beamforming[k](j, m) = trace_product(corr(k, m), est.phi(j, m)).real() / trphi;
        if (j != k && overlap != 0)
          t.contamination[k](j, m) = overlap * trace_product(corr(k, m), est.lambda(j, m)) / std::sqrt(trphi);
      }
    }
    for (int m : sc.tx_aps)
      for (int i : sc.targets.regions_of_ap[m]) t.leakage[k](i, m) = trace_product(corr(k, m), W(i, m)).real();
  }
  return t;
}

SinrParts sinr_parts(const SinrTerms& t, const PowerAllocation& a, int k, bool with_leakage) {
  SinrParts p;
  const double amp = (a.zeta.row(k).array() * t.useful.row(k).array()).sum();
  p.numerator = amp * amp;
  p.beamforming = (a.zeta.array().square() * t.beamforming[k].array()).sum();
  for (int j = 0; j < t.K; ++j) {
    if (j == k) continue;
    const cdouble c = (t.contamination[k].row(j).array() * a.zeta.row(j).array().cast<cdouble>()).sum();
    p.contamination += std::norm(c);
  }
  if (with_leakage) p.leakage = (a.nu.array().square() * t.leakage[k].array()).sum();
  p.noise = t.noise;
  return p;
}

RVector closed_form_sinr(const SinrTerms& t, const PowerAllocation& a, bool with_leakage) {
  RVector g(t.K);
  for (int k = 0; k < t.K; ++k) g(k) = sinr_parts(t, a, k, with_leakage).sinr();
  return g;
}

double achievable_rate(double gamma, int tau_c, int tau_p, double bandwidth) {
  return static_cast<double>(tau_c - tau_p) / tau_c * bandwidth * std::log2(1.0 + gamma);
}

RVector uatf_monte_carlo_oracle(const Scenario& sc, const SpatialCorrelation& corr, const EstimationMatrices& est,
                                const TargetGeometry& geom, const PowerAllocation& alloc, double noise_power,
                                long n_blocks, Rng& rng, bool with_leakage) {
  const int K = sc.config.K;
  const int S = sc.config.S;
  const int M = sc.config.M;
  const int N = sc.config.N;
  ChannelSampler sampler(sc, corr, est, geom);
  ChannelRealization real;

  CVector mean_useful = CVector::Zero(K);
  RMatrix second = RMatrix::Zero(K, K);  // E|g_{k,j}|^2
  RVector sensing = RVector::Zero(K);
  std::vector<CVector> beams(S * M);

  for (long b = 0; b < n_blocks; ++b) {
    sampler.sample_access(real, rng);
    if (with_leakage) {
      for (int i = 0; i < S; ++i) {
        const Vec3 p = sample_inspected_position(sc, i, rng);
        for (int m : sc.tx_aps)
          if (alloc.nu(i, m) != 0) beams[i * M + m] = sensing_beamformer(sc.ap_positions[m], p, N);
      }
    }
    for (int k = 0; k < K; ++k) {
      for (int j = 0; j < K; ++j) {
        cdouble g = 0;
        for (int m : sc.serving.aps_of_ue[j]) {
          if (alloc.zeta(j, m) == 0) continue;
          g += alloc.zeta(j, m) * real.channel(k, m).dot(real.estimate(j, m)) / std::sqrt(est.tr_Phi(j, m));
        }
        second(k, j) += std::norm(g);
        if (j == k) mean_useful(k) += g;
      }
      if (with_leakage) {
        for (int m : sc.tx_aps)
          for (int i : sc.targets.regions_of_ap[m]) {
            if (alloc.nu(i, m) == 0) continue;
            sensing(k) += alloc.nu(i, m) * alloc.nu(i, m) * std::norm(real.channel(k, m).dot(beams[i * M + m]));
          }
      }
    }
  }
  const double n = static_cast<double>(n_blocks);
  RVector gamma(K);
  for (int k = 0; k < K; ++k) {
    const double signal = std::norm(mean_useful(k) / n);
    const double interference = second.row(k).sum() / n - signal + sensing(k) / n + noise_power;
    gamma(k) = signal / interference;
  }
  return gamma;
}

}  // namespace cfisac

#include "cfisac/sensing.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <cmath>

using namespace cfisac;
using namespace cfisac::testing;

namespace {

ScenarioConfig one_by_one() {
  ScenarioConfig c;
  c.M = 2;
  c.n_rx_aps = 1;
  c.K = 1;
  c.S = 1;
  c.N = 2;
  c.L_serve = 1;
  c.L_tx_sense = 1;
  c.tau_p = 1;
  c.tau_s = 8;
  c.area_side = 200;
  return c;
}

struct Echo {
  Drop d;
  std::vector<CMatrix> D;  // per receive AP of region 0
  GlrtWorkspace ws;
  double noise = 0;
};

Echo make_echo(const ScenarioConfig& c, std::uint64_t seed, const PowerAllocation* alloc = nullptr) {
  Echo e{build_drop(c, seed), {}, {}, c.noise_power()};
  Rng rng(seed + 100);
  const ChannelRealization real =
      ChannelSampler(e.d.sc, e.d.corr, e.d.est, e.d.geom).sample(std::vector<bool>(c.S, true), rng);
  const PowerAllocation a = alloc ? *alloc : upc(e.d.sc);
  const TransmitSignals tx = generate_transmit_signals(e.d.sc, e.d.est, a, real, c.tau_s, rng);
  for (int m : e.d.sc.targets.rx_aps_of_region[0]) e.D.push_back(target_channel(e.d.sc, e.d.geom, tx, 0, m));
  e.ws = build_glrt_workspace(e.D, e.noise);
  return e;
}

std::vector<CVector> observe(const Echo& e, const CVector& alpha, bool present, double noise, Rng& rng) {
  std::vector<CVector> y;
  for (const CMatrix& D : e.D) y.push_back(synthesize_observation(D, alpha, present, noise, rng));
  return y;
}

}  // namespace

TEST_CASE("GLRT workspace structure") {
  const Echo e = make_echo(tiny_config(), 3);
  REQUIRE(e.ws.U.size() == e.D.size());
  int total = 0;
  for (std::size_t m = 0; m < e.D.size(); ++m) {
    const CMatrix& U = e.ws.U[m];
    CHECK((U.adjoint() * U - CMatrix::Identity(U.cols(), U.cols())).norm() < 1e-12);
    CHECK(e.ws.rank[m] <= std::min<Eigen::Index>(e.D[m].rows(), e.D[m].cols()));
    CHECK(e.ws.rank[m] >= 1);
    total += e.ws.rank[m];
  }
  CHECK(total == e.ws.total_rank);
}

TEST_CASE("observation synthesis") {
  const Echo e = make_echo(tiny_config(), 4);
  const CVector alpha = CVector::Ones(e.D[0].cols());
  Rng rng(1);
  double power = 0;
  long count = 0;
  for (int t = 0; t < 2000; ++t) {
    const CVector y = synthesize_observation(e.D[0], alpha, false, e.noise, rng);
    power += y.squaredNorm();
    count += y.size();
  }
  CHECK(power / count == doctest::Approx(e.noise).epsilon(0.03));

  Rng r1(7), r2(7);
  const CVector h0 = synthesize_observation(e.D[0], alpha, false, e.noise, r1);
  const CVector zero_rcs = synthesize_observation(e.D[0], CVector::Zero(alpha.size()), true, e.noise, r2);
  CHECK((h0 - zero_rcs).norm() == 0.0);

  // Noiseless echo lies in the span of the target channel.
  const Echo single = make_echo(one_by_one(), 5);
  Rng r3(9);
  const CVector y = synthesize_observation(single.D[0], CVector::Ones(1), true, 0.0, r3);
  const CMatrix& U = single.ws.U[0];
  CHECK((y - U * (U.adjoint() * y)).norm() <= 1e-12 * y.norm());
}

TEST_CASE("GLRT statistic under H0 follows Gamma(r, 1)") {
  const Echo e = make_echo(tiny_config(), 6);
  const double r = e.ws.total_rank;
  Rng rng(11);
  const CVector alpha = CVector::Zero(e.D[0].cols());
  std::vector<double> T;
  const int n = 10000;
  for (int t = 0; t < n; ++t) T.push_back(glrt_statistic(observe(e, alpha, false, e.noise, rng), e.ws));
  double mean = 0, var = 0;
  for (double v : T) mean += v;
  mean /= n;
  for (double v : T) var += (v - mean) * (v - mean);
  var /= (n - 1);
  const double se_mean = std::sqrt(r / n);
  CHECK(std::abs(mean - r) <= 3 * se_mean);
  // Var of the sample variance of Gamma(r,1): (mu4 - sigma^4)/n with mu4 = 3r^2 + 6r.
  const double se_var = std::sqrt((3 * r * r + 6 * r - r * r) / n);
  CHECK(std::abs(var - r) <= 3 * se_var);
  CHECK(ks_statistic_gamma(T, r) < ks_critical_1pct(T.size()));

  // Noiseless observation orthogonal to the target subspace.
  const CMatrix& U = e.ws.U[0];
  CVector y = CVector::Random(U.rows());
  y -= U * (U.adjoint() * y);
  std::vector<CVector> obs = {y};
  for (std::size_t m = 1; m < e.D.size(); ++m) obs.push_back(CVector::Zero(e.D[m].rows()));
  CHECK(glrt_statistic(obs, e.ws) < 1e-20 * y.squaredNorm() / e.noise);
}

TEST_CASE("GLRT threshold") {
  CHECK(glrt_threshold(3, 1.0) == 0.0);
  CHECK(glrt_threshold(1, std::exp(-3.0)) == doctest::Approx(3.0).epsilon(1e-12));
  CHECK_THROWS_AS(glrt_threshold(2, 0.0), DomainError);

  const Echo e = make_echo(tiny_config(), 8);
  const double delta = glrt_threshold(e.ws.total_rank, 0.01);
  Rng rng(13);
  const CVector alpha = CVector::Zero(e.D[0].cols());
  const long n = 100000;
  long alarms = 0;
  for (long t = 0; t < n; ++t) alarms += glrt_statistic(observe(e, alpha, false, e.noise, rng), e.ws) > delta;
  const auto [lo, hi] = wilson_interval(alarms, n);
  CHECK(lo <= 0.01);
  CHECK(0.01 <= hi);
}

TEST_CASE("receive SNR") {
  const Echo e = make_echo(tiny_config(), 9);
  const CMatrix& R = e.d.geom.rcs_cov[0];
  CHECK(receive_snr(e.ws, CMatrix::Zero(R.rows(), R.cols())) == 0.0);

  // Monte Carlo identity over RCS draws.
  const CMatrix Rs = psd_sqrt(R);
  Rng rng(14);
  double acc = 0;
  const int n = 10000;
  for (int t = 0; t < n; ++t) {
    const CVector alpha = sample_cn(Rs, rng);
    for (std::size_t m = 0; m < e.D.size(); ++m)
      acc += (e.ws.U[m].adjoint() * (e.D[m] * alpha)).squaredNorm() / e.noise;
  }
  const double mc = acc / n / e.ws.total_rank;
  CHECK(receive_snr(e.ws, R) == doctest::Approx(mc).epsilon(0.02));

  // Amplitudes scaled by c scale the SNR by c^2.
  std::vector<CMatrix> scaled;
  for (const CMatrix& D : e.D) scaled.push_back(1.7 * D);
  const GlrtWorkspace ws2 = build_glrt_workspace(scaled, e.noise);
  CHECK(receive_snr(ws2, R) == doctest::Approx(1.7 * 1.7 * receive_snr(e.ws, R)).epsilon(1e-10));

  const GlrtWorkspace empty = build_glrt_workspace({CMatrix::Zero(4, 2)}, e.noise);
  CHECK(empty.total_rank == 0);
  CHECK_THROWS_AS(receive_snr(empty, R), DomainError);
}

TEST_CASE("effective SNR hand-computed scalar") {
  const ScenarioConfig c = one_by_one();
  const Drop d = build_drop(c, 21);
  const int tx = d.sc.tx_aps[0], rx = d.sc.rx_aps[0];
  PowerAllocation a = PowerAllocation::zeros(d.sc);
  const double nu = 0.8;
  a.nu(0, tx) = nu;
  const double beta = d.geom.beta[0](rx, tx);
  const double expected = nu * nu * beta * c.N * c.rcs_variance() / c.noise_power();
  const EffectiveSnr got = effective_snr(d.sc, a, d.quad[0]);
  CHECK(got.snr == doctest::Approx(expected).epsilon(1e-10));

  Rng rng(2);
  const double mc = echo_energy_oracle(d, a, 0, 20000, rng) / d.quad[0].normalizer;
  CHECK(got.snr == doctest::Approx(mc).epsilon(0.03));
}

TEST_CASE("effective SNR quadratic form") {
  const Drop d = build_drop(tiny_config(), 22);
  const PowerAllocation zero = PowerAllocation::zeros(d.sc);
  CHECK(effective_snr(d.sc, zero, d.quad[0]).snr == 0.0);
  CHECK(effective_snr(d.sc, zero, d.quad[0]).rate == 0.0);
  for (const RMatrix& F : d.quad[0].F) {
    Eigen::SelfAdjointEigenSolver<RMatrix> es(F, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= 0.0);
  }

  Rng rng(3);
  for (int t = 0; t < 3; ++t) {
    const PowerAllocation a = random_allocation(d.sc, rng);
    PowerAllocation s = a;
    s.zeta *= 2.5;
    s.nu *= 2.5;
    const double g = effective_snr(d.sc, a, d.quad[0]).snr;
    CHECK(effective_snr(d.sc, s, d.quad[0]).snr == doctest::Approx(6.25 * g).epsilon(1e-12));
    Rng mc(40 + t);
    const double oracle = echo_energy_oracle(d, a, 0, 20000, mc) / d.quad[0].normalizer;
    CHECK(g == doctest::Approx(oracle).epsilon(0.03));
  }
}

TEST_CASE("sensing rate") {
  CHECK(sensing_rate(1.0, 1.0, 20e6) == doctest::Approx(20e6));
  CHECK(sensing_rate(0.0, 0.4, 20e6) == 0.0);
  ScenarioConfig c = one_by_one();
  c.tau_s = c.tau_c;
  const Drop d = build_drop(c, 23);
  PowerAllocation a = PowerAllocation::zeros(d.sc);
  a.nu(0, d.sc.tx_aps[0]) = 1.0;
  const EffectiveSnr e = effective_snr(d.sc, a, d.quad[0]);
  CHECK(e.rate == doctest::Approx(c.bandwidth * std::log2(1 + e.snr)));
}

TEST_CASE("detection probability grows with the sensing amplitude") {
  const ScenarioConfig c = one_by_one();
  const Drop d = build_drop(c, 24);
  const int tx = d.sc.tx_aps[0];
  PowerAllocation a = PowerAllocation::zeros(d.sc);
  a.nu(0, tx) = 1.0;
  Rng rng(30);
  const ChannelRealization real = ChannelSampler(d.sc, d.corr, d.est, d.geom).sample({true}, rng);
  const TransmitSignals sig = generate_transmit_signals(d.sc, d.est, a, real, c.tau_s, rng);
  const CMatrix D1 = target_channel(d.sc, d.geom, sig, 0, d.sc.rx_aps[0]);
  const double noise = c.noise_power();
  // Unit-amplitude receive SNR sets the scale of the grid.
  const GlrtWorkspace ws1 = build_glrt_workspace({D1}, noise);
  const double snr1 = receive_snr(ws1, d.geom.rcs_cov[0]);
  const double delta = glrt_threshold(ws1.total_rank, 0.01);

  double prev = 0;
  for (double target_snr : {1e-3, 0.05, 0.2, 0.5, 1.0, 2.0, 5.0, 20.0, 50.0}) {
    const double nu = std::sqrt(target_snr / snr1);
    const GlrtWorkspace ws = build_glrt_workspace({nu * D1}, noise);
    Rng trials(77);
    const CMatrix Rs = psd_sqrt(d.geom.rcs_cov[0]);
    long hits = 0;
    const long n = 4000;
    for (long t = 0; t < n; ++t) {
      const CVector alpha = sample_cn(Rs, trials);
      const CVector y = synthesize_observation(nu * D1, alpha, true, noise, trials);
      hits += glrt_statistic({y}, ws) > delta;
    }
    const double pd = static_cast<double>(hits) / n;
    CHECK(pd >= prev - 0.01);
    prev = pd;
  }
  CHECK(prev > 0.8);
}

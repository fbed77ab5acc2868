#include "cfisac/scenario.hpp"

#include "oracles.hpp"

#include <doctest.h>

#include <algorithm>
#include <set>

using namespace cfisac;

namespace {

bool contains(const std::vector<int>& v, int x) { return std::find(v.begin(), v.end(), x) != v.end(); }

void check_consistency(const Scenario& sc) {
  const int M = sc.config.M;
  REQUIRE(static_cast<int>(sc.tx_aps.size() + sc.rx_aps.size()) == M);
  std::set<int> all(sc.tx_aps.begin(), sc.tx_aps.end());
  all.insert(sc.rx_aps.begin(), sc.rx_aps.end());
  CHECK(static_cast<int>(all.size()) == M);

  for (int k = 0; k < sc.config.K; ++k) {
    CHECK(static_cast<int>(sc.serving.aps_of_ue[k].size()) == sc.config.L_serve);
    for (int m = 0; m < M; ++m) {
      CHECK(contains(sc.serving.aps_of_ue[k], m) == contains(sc.serving.ues_of_ap[m], k));
      if (contains(sc.serving.aps_of_ue[k], m)) CHECK_FALSE(sc.is_receive[m]);
    }
  }
  for (int i = 0; i < sc.config.S; ++i) {
    for (int m : sc.targets.rx_aps_of_region[i]) CHECK(sc.is_receive[m]);
    for (int m = 0; m < M; ++m)
      CHECK(contains(sc.targets.tx_aps_of_region[i], m) == contains(sc.targets.regions_of_ap[m], i));
  }
}

}  // namespace

TEST_CASE("paper-scale scenario is valid and consistent") {
  ScenarioConfig c;
  const Scenario sc = build_scenario(c, 7);
  CHECK(sc.config.M == 16);
  CHECK(sc.config.K == 16);
  CHECK(c.area_side * c.area_side == doctest::Approx(0.5e6));
  check_consistency(sc);
  for (const auto& p : sc.ap_positions) CHECK(p.z() == 10.0);
  for (const auto& p : sc.ue_positions) CHECK(p.z() == 1.65);
  for (int i = 0; i < c.S; ++i) {
    const Vec3& p = sc.radar_cells[i];
    CHECK(sc.regions[i].contains(p.x(), p.y()));
    CHECK(p.z() >= 20.0);
    CHECK(p.z() <= 100.0);
  }
  for (int m = 0; m < c.M; ++m) CHECK(sc.power_budget[m] == (sc.is_receive[m] ? 0.0 : c.P_m));
}

TEST_CASE("regions tile the area without overlap") {
  for (int S : {1, 2, 3, 4, 6}) {
    const auto regions = tile_regions(700, S);
    REQUIRE(static_cast<int>(regions.size()) == S);
    double area = 0;
    for (const auto& r : regions) area += r.area();
    CHECK(area == doctest::Approx(700.0 * 700.0));
    for (int a = 0; a < S; ++a)
      for (int b = a + 1; b < S; ++b) {
        const double w = std::min(regions[a].x_max, regions[b].x_max) - std::max(regions[a].x_min, regions[b].x_min);
        const double h = std::min(regions[a].y_max, regions[b].y_max) - std::max(regions[a].y_min, regions[b].y_min);
        CHECK((w <= 1e-9 || h <= 1e-9));
      }
  }
  const auto grid = tile_regions(2, 4);
  CHECK(grid[0].x_max == doctest::Approx(1.0));
  CHECK(grid[0].y_max == doctest::Approx(1.0));
}

TEST_CASE("same seed reproduces the scenario exactly") {
  ScenarioConfig c;
  const Scenario a = build_scenario(c, 42);
  const Scenario b = build_scenario(c, 42);
  for (int m = 0; m < c.M; ++m) CHECK(a.ap_positions[m] == b.ap_positions[m]);
  for (int k = 0; k < c.K; ++k) CHECK(a.ue_positions[k] == b.ue_positions[k]);
  for (int i = 0; i < c.S; ++i) CHECK(a.radar_cells[i] == b.radar_cells[i]);
  CHECK(a.rx_aps == b.rx_aps);
  CHECK(a.serving.aps_of_ue == b.serving.aps_of_ue);
  const Scenario other = build_scenario(c, 43);
  CHECK_FALSE(other.ap_positions[0] == a.ap_positions[0]);
}

TEST_CASE("two APs split into one transmit and one receive AP") {
  ScenarioConfig c;
  c.M = 2;
  c.n_rx_aps = 1;
  c.K = 2;
  c.S = 1;
  c.L_serve = 1;
  c.L_tx_sense = 1;
  const Scenario sc = build_scenario(c, 3);
  CHECK(sc.tx_aps.size() == 1);
  CHECK(sc.rx_aps.size() == 1);
  CHECK(sc.tx_aps[0] != sc.rx_aps[0]);
  check_consistency(sc);
}

TEST_CASE("invalid configurations are rejected") {
  ScenarioConfig c;
  c.L_serve = c.M;
  CHECK_THROWS_AS(build_scenario(c, 1), ConfigError);
  c = ScenarioConfig{};
  c.K = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ScenarioConfig{};
  c.tau_p = c.tau_c;
  CHECK_THROWS_AS(c.validate(), ConfigError);
  c = ScenarioConfig{};
  c.P_m = 0;
  CHECK_THROWS_AS(c.validate(), ConfigError);
}

TEST_CASE("user association picks the strongest transmit APs") {
  RMatrix g(1, 3);
  g << 3, 1, 2;
  const ServingSets s = associate_users(g, {0, 1, 2}, 3, 2);
  CHECK(s.aps_of_ue[0] == std::vector<int>{0, 2});
  CHECK(s.ues_of_ap[1].empty());

  const ServingSets full = associate_users(g, {0, 1, 2}, 3, 3);
  CHECK(full.aps_of_ue[0] == std::vector<int>{0, 1, 2});
  CHECK_THROWS_AS(associate_users(g, {0, 1, 2}, 3, 4), ConfigError);

  Rng rng(5);
  RMatrix rg(16, 16);
  for (int k = 0; k < 16; ++k)
    for (int m = 0; m < 16; ++m) rg(k, m) = rng.uniform(1e-12, 1e-9);
  std::vector<int> tx(16);
  for (int m = 0; m < 16; ++m) tx[m] = m;
  const ServingSets r = associate_users(rg, tx, 16, 4);
  for (int k = 0; k < 16; ++k) {
    CHECK(r.aps_of_ue[k].size() == 4);
    double weakest_in = 1, strongest_out = 0;
    for (int m = 0; m < 16; ++m) {
      CHECK(contains(r.aps_of_ue[k], m) == contains(r.ues_of_ap[m], k));
      if (contains(r.aps_of_ue[k], m))
        weakest_in = std::min(weakest_in, rg(k, m));
      else
        strongest_out = std::max(strongest_out, rg(k, m));
    }
    CHECK(weakest_in >= strongest_out);
  }
}

TEST_CASE("target association uses the nearest APs") {
  for (std::uint64_t seed = 1; seed <= 5; ++seed) {
    ScenarioConfig c;
    const Scenario sc = build_scenario(c, seed);
    for (int i = 0; i < c.S; ++i) {
      const Vec3& p = sc.radar_cells[i];
      double max_in = 0, min_out = 1e300;
      for (int m : sc.tx_aps) {
        const double d = (sc.ap_positions[m] - p).norm();
        if (contains(sc.targets.tx_aps_of_region[i], m))
          max_in = std::max(max_in, d);
        else
          min_out = std::min(min_out, d);
      }
      CHECK(max_in <= min_out);
      const int rx = sc.targets.rx_aps_of_region[i][0];
      for (int m : sc.rx_aps) CHECK((sc.ap_positions[rx] - p).norm() <= (sc.ap_positions[m] - p).norm());
    }
  }
}

TEST_CASE("a single receive AP collects every region") {
  ScenarioConfig c;
  c.n_rx_aps = 1;
  const Scenario sc = build_scenario(c, 11);
  for (int i = 0; i < c.S; ++i) CHECK(sc.targets.rx_aps_of_region[i] == sc.rx_aps);
}

TEST_CASE("a radar cell above a receive AP selects that AP") {
  ScenarioConfig c;
  Scenario sc = build_scenario(c, 9);
  const int rx = sc.rx_aps[1];
  sc.radar_cells[0] = Vec3(sc.ap_positions[rx].x(), sc.ap_positions[rx].y(), 50.0);
  const TargetSets t = associate_targets(sc);
  CHECK(t.rx_aps_of_region[0] == std::vector<int>{rx});
}

TEST_CASE("steering vector convention") {
  const CVector broadside = steering_vector(0.0, 0.0, 4);
  for (int n = 0; n < 4; ++n) CHECK(std::abs(broadside(n) - cdouble(1, 0)) < 1e-15);

  const CVector endfire = steering_vector(kPi / 2, 0.0, 2);
  CHECK(std::abs(endfire(0) - cdouble(1, 0)) < 1e-15);
  CHECK(std::abs(endfire(1) - cdouble(-1, 0)) < 1e-15);

  Rng rng(3);
  for (int t = 0; t < 50; ++t) {
    const CVector a = steering_vector(rng.uniform(-kPi, kPi), rng.uniform(-kPi / 2, kPi / 2), 4);
    CHECK(a.squaredNorm() == doctest::Approx(4.0).epsilon(1e-12));
    for (int n = 0; n < 4; ++n) CHECK(std::abs(a(n)) == doctest::Approx(1.0).epsilon(1e-12));
  }
}

TEST_CASE("path loss model") {
  const Vec3 o(0, 0, 0);
  const double fc = 2e9;
  const double g1 = large_scale_gain(o, Vec3(50, 0, 0), LinkKind::NlosAccess, fc);
  const double g2 = large_scale_gain(o, Vec3(100, 0, 0), LinkKind::NlosAccess, fc);
  CHECK(g2 / g1 == doctest::Approx(std::pow(2.0, -3.67)).epsilon(1e-12));
  const double l1 = large_scale_gain(o, Vec3(50, 0, 0), LinkKind::LosTarget, fc);
  const double l2 = large_scale_gain(o, Vec3(100, 0, 0), LinkKind::LosTarget, fc);
  CHECK(l2 / l1 == doctest::Approx(std::pow(2.0, -2.2)).epsilon(1e-12));
  CHECK(std::isfinite(g1));
  CHECK(g1 > 0);

  double prev = 1e300;
  for (double d = 1; d < 2000; d *= 1.3) {
    const double g = large_scale_gain(o, Vec3(d, 0, 0), LinkKind::NlosAccess, fc);
    CHECK(g <= prev);
    prev = g;
  }
  CHECK_THROWS_AS(large_scale_gain(o, o, LinkKind::NlosAccess, fc), DomainError);
  CHECK(path_loss_db(1.0, LinkKind::NlosAccess, 1e9) == doctest::Approx(22.7));
}

#include "cfisac/scenario.hpp"

#include "cfisac/rng.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <string>

namespace cfisac {

namespace {

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError("invalid scenario config: " + what);
}

}  // namespace

void ScenarioConfig::validate() const {
  require(area_side > 0, "area_side must be positive");
  require(M >= 2, "M must be at least 2");
  require(K >= 1 && S >= 1 && N >= 1, "K, S and N must be positive");
  require(P_m > 0 && bandwidth > 0 && carrier_frequency > 0, "powers and frequencies must be positive");
  require(tau_c >= 1 && tau_p >= 1 && tau_s >= 1, "symbol counts must be positive");
  require(tau_p < tau_c, "tau_p must be smaller than tau_c");
  require(tau_s <= tau_c, "tau_s must not exceed tau_c");
  require(n_rx_aps >= 1 && n_rx_aps < M, "n_rx_aps must be in [1, M-1]");
  require(L_serve >= 1 && L_serve <= M - n_rx_aps, "L_serve must be in [1, |M^tx|]");
  require(L_tx_sense >= 1 && L_tx_sense <= M - n_rx_aps, "L_tx_sense must be in [1, |M^tx|]");
  require(ue_height >= 0 && ap_height >= 0, "heights must be non-negative");
  require(target_height_min <= target_height_max, "target height range is empty");
  require(pilot_power > 0, "pilot_power must be positive");
  require(angular_spread_deg >= 0 && rcs_view_width_deg > 0, "angular widths must be positive");
  require(beam_mc_positions >= 1, "beam_mc_positions must be positive");
}

ViewAngles view_angles(const Vec3& from, const Vec3& to) {
  const Vec3 d = to - from;
  const double horizontal = std::hypot(d.x(), d.y());
  return {std::atan2(d.x(), d.y()), std::atan2(d.z(), horizontal)};
}

CVector steering_vector(double azimuth, double elevation, int N) {
  const double phase = kPi * std::sin(azimuth) * std::cos(elevation);
  CVector a(N);
  for (int n = 0; n < N; ++n) a(n) = std::polar(1.0, phase * n);
  return a;
}

CVector steering_vector(const Vec3& array_position, const Vec3& point, int N) {
  const ViewAngles v = view_angles(array_position, point);
  return steering_vector(v.azimuth, v.elevation, N);
}

double path_loss_db(double distance, LinkKind kind, double carrier_frequency) {
  if (!(distance > 0)) throw DomainError("path loss requires a positive distance");
  const double fc_ghz = carrier_frequency / 1e9;
  switch (kind) {
    case LinkKind::NlosAccess:
      return 36.7 * std::log10(distance) + 22.7 + 26.0 * std::log10(fc_ghz);
    case LinkKind::LosTarget:
      return 22.0 * std::log10(distance) + 28.0 + 20.0 * std::log10(fc_ghz);
  }
  return 0.0;
}

double large_scale_gain(const Vec3& tx, const Vec3& rx, LinkKind kind, double carrier_frequency) {
  return std::pow(10.0, -path_loss_db((tx - rx).norm(), kind, carrier_frequency) / 10.0);
}

std::vector<Region> tile_regions(double side, int S) {
  int rows = 1;
  for (int r = 1; r * r <= S; ++r)
    if (S % r == 0) rows = r;
  const int cols = S / rows;
  std::vector<Region> regions;
  regions.reserve(S);
  const double w = side / cols;
  const double h = side / rows;
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c)
      regions.push_back({c * w, r * h, c == cols - 1 ? side : (c + 1) * w, r == rows - 1 ? side : (r + 1) * h});
  return regions;
}

std::vector<int> select_receive_aps(const std::vector<Vec3>& ap_positions, int count, double side) {
  const int M = static_cast<int>(ap_positions.size());
  const Vec3 centre(side / 2, side / 2, ap_positions.empty() ? 0.0 : ap_positions[0].z());
  std::vector<int> chosen;
  std::vector<double> min_dist(M, std::numeric_limits<double>::infinity());

  int first = 0;
  for (int m = 1; m < M; ++m)
    if ((ap_positions[m] - centre).norm() < (ap_positions[first] - centre).norm()) first = m;
  chosen.push_back(first);

  while (static_cast<int>(chosen.size()) < count) {
    const int last = chosen.back();
    for (int m = 0; m < M; ++m) min_dist[m] = std::min(min_dist[m], (ap_positions[m] - ap_positions[last]).norm());
    int best = -1;
    for (int m = 0; m < M; ++m) {
      if (std::find(chosen.begin(), chosen.end(), m) != chosen.end()) continue;
      if (best < 0 || min_dist[m] > min_dist[best]) best = m;
    }
    chosen.push_back(best);
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

ServingSets associate_users(const RMatrix& gains, const std::vector<int>& tx_aps, int M, int L_serve) {
  if (L_serve < 1 || L_serve > static_cast<int>(tx_aps.size()))
    throw ConfigError("L_serve exceeds the number of transmit APs");
  const int K = static_cast<int>(gains.rows());
  ServingSets sets;
  sets.aps_of_ue.resize(K);
  sets.ues_of_ap.assign(M, {});
  for (int k = 0; k < K; ++k) {
    std::vector<int> order = tx_aps;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return gains(k, a) > gains(k, b); });
    order.resize(L_serve);
    std::sort(order.begin(), order.end());
    for (int m : order) sets.ues_of_ap[m].push_back(k);
    sets.aps_of_ue[k] = std::move(order);
  }
  return sets;
}

TargetSets associate_targets(const Scenario& sc) {
  const int S = static_cast<int>(sc.radar_cells.size());
  const int L = sc.config.L_tx_sense;
  if (sc.rx_aps.empty() || static_cast<int>(sc.tx_aps.size()) < L)
    throw ConfigError("not enough APs for target-centric clustering");
  TargetSets sets;
  sets.tx_aps_of_region.resize(S);
  sets.rx_aps_of_region.resize(S);
  sets.regions_of_ap.assign(sc.ap_positions.size(), {});
  for (int i = 0; i < S; ++i) {
    const Vec3& p = sc.radar_cells[i];
    auto dist = [&](int m) { return (sc.ap_positions[m] - p).norm(); };
    int nearest_rx = sc.rx_aps.front();
    for (int m : sc.rx_aps)
      if (dist(m) < dist(nearest_rx)) nearest_rx = m;
    sets.rx_aps_of_region[i] = {nearest_rx};

    std::vector<int> order = sc.tx_aps;
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) { return dist(a) < dist(b); });
    order.resize(L);
    std::sort(order.begin(), order.end());
    for (int m : order) sets.regions_of_ap[m].push_back(i);
    sets.tx_aps_of_region[i] = std::move(order);
  }
  return sets;
}

RMatrix access_gains(const Scenario& sc) {
  const int K = static_cast<int>(sc.ue_positions.size());
  const int M = static_cast<int>(sc.ap_positions.size());
  RMatrix g = RMatrix::Zero(K, M);
  for (int k = 0; k < K; ++k)
    for (int m : sc.tx_aps)
      g(k, m) = large_scale_gain(sc.ap_positions[m], sc.ue_positions[k], LinkKind::NlosAccess,
                                 sc.config.carrier_frequency);
  return g;
}

Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed) {
  config.validate();
  Scenario sc;
  sc.config = config;
  sc.config.seed = seed;
  const double side = config.area_side;
  Rng root(seed);
  Rng geo = root.child("geometry");

  sc.ap_positions.reserve(config.M);
  for (int m = 0; m < config.M; ++m) {
    const double x = geo.uniform(0, side);
    const double y = geo.uniform(0, side);
    sc.ap_positions.emplace_back(x, y, config.ap_height);
  }
  sc.ue_positions.reserve(config.K);
  for (int k = 0; k < config.K; ++k) {
    const double x = geo.uniform(0, side);
    const double y = geo.uniform(0, side);
    sc.ue_positions.emplace_back(x, y, config.ue_height);
  }

  sc.rx_aps = select_receive_aps(sc.ap_positions, config.n_rx_aps, side);
  sc.is_receive.assign(config.M, false);
  for (int m : sc.rx_aps) sc.is_receive[m] = true;
  sc.tx_index.assign(config.M, -1);
  for (int m = 0; m < config.M; ++m) {
    if (sc.is_receive[m]) continue;
    sc.tx_index[m] = static_cast<int>(sc.tx_aps.size());
    sc.tx_aps.push_back(m);
  }
  sc.power_budget.assign(config.M, 0.0);
  for (int m : sc.tx_aps) sc.power_budget[m] = config.P_m;

  sc.regions = tile_regions(side, config.S);
  Rng cells = root.child("radar_cells");
  for (const Region& r : sc.regions) {
    const double x = cells.uniform(r.x_min, r.x_max);
    const double y = cells.uniform(r.y_min, r.y_max);
    const double z = cells.uniform(config.target_height_min, config.target_height_max);
    sc.radar_cells.emplace_back(x, y, z);
  }

  sc.serving = associate_users(access_gains(sc), sc.tx_aps, config.M, config.L_serve);
  sc.targets = associate_targets(sc);
  return sc;
}

}  // namespace cfisac

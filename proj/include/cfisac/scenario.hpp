#pragma once

#include "cfisac/common.hpp"

#include <cstdint>
#include <vector>

namespace cfisac {

/// Network and propagation parameters for one experiment. Defaults reproduce
/// the 16-AP / 16-UE urban-micro deployment.
struct ScenarioConfig {
  double area_side = 707.10678118654752;  // m, 0.5 km^2 square
  int M = 16;                             // APs
  int K = 16;                             // UEs
  int S = 4;                              // sensing regions
  int N = 4;                              // antennas per AP
  double P_m = 2.0;                       // W per AP
  double bandwidth = 20e6;                // Hz
  double carrier_frequency = 2e9;         // Hz
  double noise_density_dbm_hz = -174.0;
  int tau_c = 50;
  int tau_p = 8;
  int tau_s = 50;
  double rcs_variance_dbsm = 10.0;
  int n_rx_aps = 4;
  int L_serve = 4;
  int L_tx_sense = 4;
  double ue_height = 1.65;
  double ap_height = 10.0;
  double target_height_min = 20.0;
  double target_height_max = 100.0;
  double pilot_power = 0.1;           // W, uplink training
  double angular_spread_deg = 15.0;   // local-scattering spread for C_{k,m}
  double rcs_view_width_deg = 20.0;   // RCS angular-view kernel width
  int beam_mc_positions = 1000;       // positions averaged per W_{i,m}
  std::uint64_t seed = 1;

  double noise_power() const {
    return std::pow(10.0, noise_density_dbm_hz / 10.0) * 1e-3 * bandwidth;
  }
  double rcs_variance() const { return db_to_linear(rcs_variance_dbsm); }

  /// Throws ConfigError when an invariant is violated.
  void validate() const;
};

/// Axis-aligned rectangle in the ground plane.
struct Region {
  double x_min = 0, y_min = 0, x_max = 0, y_max = 0;
  double area() const { return (x_max - x_min) * (y_max - y_min); }
  bool contains(double x, double y) const {
    return x >= x_min && x <= x_max && y >= y_min && y <= y_max;
  }
};

/// Per-UE serving sets M_k and their inverse K_m (global AP indices).
struct ServingSets {
  std::vector<std::vector<int>> aps_of_ue;  // M_k, sorted
  std::vector<std::vector<int>> ues_of_ap;  // K_m, sorted; empty for receive APs
};

/// Target-centric clusters M_p^tx / M_p^rx and their inverse S_m.
struct TargetSets {
  std::vector<std::vector<int>> tx_aps_of_region;  // M_{p_i}^tx, sorted
  std::vector<std::vector<int>> rx_aps_of_region;  // M_{p_i}^rx
  std::vector<std::vector<int>> regions_of_ap;     // S_m, empty for receive APs
};

struct Scenario {
  ScenarioConfig config;
  std::vector<Vec3> ap_positions;
  std::vector<bool> is_receive;
  std::vector<int> tx_aps;      // M^tx, ascending global index
  std::vector<int> rx_aps;      // M^rx, ascending global index
  std::vector<int> tx_index;    // global AP -> position in tx_aps, -1 for receive APs
  std::vector<Vec3> ue_positions;
  std::vector<Region> regions;
  std::vector<Vec3> radar_cells;  // p_i, one per region
  ServingSets serving;
  TargetSets targets;
  std::vector<double> power_budget;  // per AP, zero for receive APs

  int num_tx() const { return static_cast<int>(tx_aps.size()); }
};

struct ViewAngles {
  double azimuth;    // from array broadside (local y-axis), radians
  double elevation;  // above the array plane, radians
};

/// Angles of `to` as seen from an array located at `from`.
ViewAngles view_angles(const Vec3& from, const Vec3& to);

/// Half-wavelength ULA along the local x-axis: entry n = exp(j pi n sin(az) cos(el)).
CVector steering_vector(double azimuth, double elevation, int N);
CVector steering_vector(const Vec3& array_position, const Vec3& point, int N);

enum class LinkKind { NlosAccess, LosTarget };

/// Path-loss model for urban micro links: NLOS for AP-UE, LOS for AP-target.
double path_loss_db(double distance, LinkKind kind, double carrier_frequency);
/// Linear power gain 10^(-PL/10); throws DomainError on zero distance.
double large_scale_gain(const Vec3& tx, const Vec3& rx, LinkKind kind, double carrier_frequency);

/// S equal rectangles tiling the square [0, side]^2.
std::vector<Region> tile_regions(double side, int S);

/// Farthest-point selection of `count` receive APs, seeded at the AP nearest the area centre.
std::vector<int> select_receive_aps(const std::vector<Vec3>& ap_positions, int count, double side);

/// gains is K x M (global AP index); only transmit APs are eligible.
ServingSets associate_users(const RMatrix& gains, const std::vector<int>& tx_aps, int M, int L_serve);

TargetSets associate_targets(const Scenario& scenario);

Scenario build_scenario(const ScenarioConfig& config, std::uint64_t seed);
inline Scenario build_scenario(const ScenarioConfig& config) { return build_scenario(config, config.seed); }

/// K x M matrix of NLOS access gains (zero for receive APs).
RMatrix access_gains(const Scenario& scenario);

}  // namespace cfisac

#pragma once

#include "cfisac/channels.hpp"
#include "cfisac/comm_metrics.hpp"
#include "cfisac/estimation.hpp"
#include "cfisac/power_control.hpp"
#include "cfisac/scenario.hpp"
#include "cfisac/sensing.hpp"

#include <nlohmann/json.hpp>

#include <cstdint>
#include <string>
#include <utility>
#include <vector>

namespace cfisac {

/// Everything a drop needs: geometry, second-order statistics and the
/// coefficients of the SINR and effective-SNR expressions.
struct Drop {
  int id = 0;
  std::uint64_t seed = 0;
  Scenario sc;
  SpatialCorrelation corr;
  EstimationMatrices est;
  TargetGeometry geom;
  SensingBeamCovariance W;
  SinrTerms terms;
  std::vector<SensingQuadratic> quad;

  PowerControlInputs inputs() const { return {sc, terms, quad}; }
};

Drop build_drop(const ScenarioConfig& config, std::uint64_t seed, int id = 0);

/// Seed of drop `drop_id` under `master_seed`.
std::uint64_t drop_seed(std::uint64_t master_seed, int drop_id);

struct ExperimentConfig {
  ScenarioConfig scenario;
  int n_drops = 100;
  std::vector<std::string> modes = {"upc", "jopc_cp", "jopc_sp", "sopc"};
  double cp_gamma_bar0 = 0;  // sensing floor of jopc_cp runs (linear)
  double sp_gamma0 = 0;      // SINR floor of jopc_sp runs (linear)
  std::vector<double> cp_sensing_thresholds = {0, 1, 10, 100, 1000};  // gamma_bar0 sweep
  std::vector<double> sp_sinr_thresholds = {0, 0.1, 0.3, 1, 3};        // gamma0 sweep
  std::vector<double> T_grid = {0, 0.25, 0.5, 0.75, 1};
  double quantile = 0.10;
  std::string output_dir = "out";
  std::uint64_t master_seed = 1;
  int threads = 1;
  double bisection_tol = 1e-3;
  double sca_tol = 1e-4;
  int sca_max_iters = 30;

  void validate() const;
};

ExperimentConfig config_from_json(const nlohmann::json& j);
nlohmann::json config_to_json(const ExperimentConfig& c);
ExperimentConfig load_config(const std::string& path);

/// One long-format CSV row: drop_id, mode, entity_id, metric, value.
struct Row {
  int drop_id = 0;
  std::string mode;
  std::string entity;
  std::string metric;
  std::string value;
};

struct DropRecord {
  int drop_id = 0;
  std::vector<Row> rows;
  double seconds = 0;  // wall time; kept out of every output file
};

/// Per-drop metrics of every requested mode.
DropRecord evaluate_drop(const ExperimentConfig& config, int drop_id);

/// Runs all drops and writes drops.csv and manifest.json into output_dir.
/// Throws IoError before any computation if output_dir is not writable.
std::vector<DropRecord> run_experiment(const ExperimentConfig& config);

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values);
double quantile(std::vector<double> values, double q);

struct RegionPoint {
  std::string branch;  // jopc_cp, jopc_sp or sopc
  double parameter = 0;
  double rate = 0;          // q-quantile of the per-drop minimum UE rate
  double sensing_rate = 0;  // q-quantile of the per-drop minimum effective-SNR rate
  double feasible_fraction = 0;
  bool kept = false;      // at least half of the drops feasible
  bool boundary = false;  // kept and not dominated by another point of the same curve
};

struct RegionResult {
  std::vector<RegionPoint> points;
  std::vector<DropRecord> records;
};

/// C-S region sweep; writes region.csv and region_points.csv. The J-OPC curve
/// joins the jopc_cp and jopc_sp points; S-OPC forms its own curve.
RegionResult cs_region(const ExperimentConfig& config);

/// Writes cdf.csv with the empirical CDFs of per-UE rates and per-region
/// effective-SNR rates of every mode.
void write_cdfs(const ExperimentConfig& config, const std::vector<DropRecord>& records);

std::string format_value(double v);

}  // namespace cfisac

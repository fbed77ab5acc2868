#include "cfisac/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <condition_variable>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <set>
#include <thread>

namespace cfisac {

namespace fs = std::filesystem;

std::uint64_t drop_seed(std::uint64_t master_seed, int drop_id) {
  return Rng(master_seed).child(static_cast<std::uint64_t>(drop_id)).seed();
}

Drop build_drop(const ScenarioConfig& config, std::uint64_t seed, int id) {
  Drop d;
  d.id = id;
  d.seed = seed;
  d.sc = build_scenario(config, seed);
  const double noise = config.noise_power();
  d.corr = build_correlation(d.sc);
  d.est = build_estimation(d.sc, d.corr, assign_pilots(config.K, config.tau_p), config.pilot_power, noise);
  d.geom = build_target_geometry(d.sc);
  Rng beams = Rng(seed).child("beams");
  d.W = build_beam_covariances(d.sc, beams);
  d.terms = build_sinr_terms(d.sc, d.corr, d.est, d.W, noise);
  d.quad = effective_snr_matrices(d.sc, d.geom, d.est, config.tau_s, noise);
  return d;
}

// ---------------------------------------------------------------- config

void ExperimentConfig::validate() const {
  scenario.validate();
  if (n_drops < 1) throw ConfigError("n_drops must be at least 1");
  if (!(quantile > 0 && quantile < 1)) throw ConfigError("quantile must lie in (0, 1)");
  if (threads < 0) throw ConfigError("threads must be nonnegative");
  static const std::set<std::string> known = {"upc", "jopc_cp", "jopc_sp", "sopc"};
  if (modes.empty()) throw ConfigError("at least one mode is required");
  for (const auto& m : modes)
    if (!known.count(m)) throw ConfigError("unknown mode '" + m + "'");
  const bool uses_sopc = std::find(modes.begin(), modes.end(), "sopc") != modes.end();
  if (uses_sopc && T_grid.empty()) throw ConfigError("T_grid must be nonempty for sopc");
  for (double T : T_grid)
    if (!(T >= 0 && T <= 1)) throw ConfigError("T_grid values must lie in [0, 1]");
  for (double v : cp_sensing_thresholds)
    if (!(v >= 0)) throw ConfigError("cp_sensing_thresholds must be nonnegative");
  for (double v : sp_sinr_thresholds)
    if (!(v >= 0)) throw ConfigError("sp_sinr_thresholds must be nonnegative");
  if (!(cp_gamma_bar0 >= 0) || !(sp_gamma0 >= 0)) throw ConfigError("thresholds must be nonnegative");
  if (!(bisection_tol > 0) || !(sca_tol > 0) || sca_max_iters < 1) throw ConfigError("invalid solver tolerances");
  if (output_dir.empty()) throw ConfigError("output_dir must be set");
}

namespace {

template <typename T>
void take(const nlohmann::json& j, const char* key, T& out, std::set<std::string>& seen) {
  seen.insert(key);
  if (!j.contains(key)) return;
  try {
    out = j.at(key).get<T>();
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("bad value for '") + key + "': " + e.what());
  }
}

void reject_unknown(const nlohmann::json& j, const std::set<std::string>& seen, const std::string& where) {
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!seen.count(it.key())) throw ConfigError("unknown key '" + it.key() + "' in " + where);
}

ScenarioConfig scenario_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("scenario must be an object");
  ScenarioConfig c;
  std::set<std::string> seen;
  take(j, "area_side", c.area_side, seen);
  take(j, "M", c.M, seen);
  take(j, "K", c.K, seen);
  take(j, "S", c.S, seen);
  take(j, "N", c.N, seen);
  take(j, "P_m", c.P_m, seen);
  take(j, "bandwidth", c.bandwidth, seen);
  take(j, "carrier_frequency", c.carrier_frequency, seen);
  take(j, "noise_density_dbm_hz", c.noise_density_dbm_hz, seen);
  take(j, "tau_c", c.tau_c, seen);
  take(j, "tau_p", c.tau_p, seen);
  take(j, "tau_s", c.tau_s, seen);
  take(j, "rcs_variance_dbsm", c.rcs_variance_dbsm, seen);
  take(j, "n_rx_aps", c.n_rx_aps, seen);
  take(j, "L_serve", c.L_serve, seen);
  take(j, "L_tx_sense", c.L_tx_sense, seen);
  take(j, "ue_height", c.ue_height, seen);
  take(j, "ap_height", c.ap_height, seen);
  take(j, "target_height_min", c.target_height_min, seen);
  take(j, "target_height_max", c.target_height_max, seen);
  take(j, "pilot_power", c.pilot_power, seen);
  take(j, "angular_spread_deg", c.angular_spread_deg, seen);
  take(j, "rcs_view_width_deg", c.rcs_view_width_deg, seen);
  take(j, "beam_mc_positions", c.beam_mc_positions, seen);
  take(j, "seed", c.seed, seen);
  reject_unknown(j, seen, "scenario");
  return c;
}

nlohmann::json scenario_to_json(const ScenarioConfig& c) {
  return {{"area_side", c.area_side},
          {"M", c.M},
          {"K", c.K},
          {"S", c.S},
          {"N", c.N},
          {"P_m", c.P_m},
          {"bandwidth", c.bandwidth},
          {"carrier_frequency", c.carrier_frequency},
          {"noise_density_dbm_hz", c.noise_density_dbm_hz},
          {"tau_c", c.tau_c},
          {"tau_p", c.tau_p},
          {"tau_s", c.tau_s},
          {"rcs_variance_dbsm", c.rcs_variance_dbsm},
          {"n_rx_aps", c.n_rx_aps},
          {"L_serve", c.L_serve},
          {"L_tx_sense", c.L_tx_sense},
          {"ue_height", c.ue_height},
          {"ap_height", c.ap_height},
          {"target_height_min", c.target_height_min},
          {"target_height_max", c.target_height_max},
          {"pilot_power", c.pilot_power},
          {"angular_spread_deg", c.angular_spread_deg},
          {"rcs_view_width_deg", c.rcs_view_width_deg},
          {"beam_mc_positions", c.beam_mc_positions},
          {"seed", c.seed}};
}

}  // namespace

ExperimentConfig config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) throw ConfigError("config must be a JSON object");
  ExperimentConfig c;
  std::set<std::string> seen = {"scenario"};
  if (j.contains("scenario")) c.scenario = scenario_from_json(j.at("scenario"));
  take(j, "n_drops", c.n_drops, seen);
  take(j, "modes", c.modes, seen);
  take(j, "cp_gamma_bar0", c.cp_gamma_bar0, seen);
  take(j, "sp_gamma0", c.sp_gamma0, seen);
  take(j, "cp_sensing_thresholds", c.cp_sensing_thresholds, seen);
  take(j, "sp_sinr_thresholds", c.sp_sinr_thresholds, seen);
  take(j, "T_grid", c.T_grid, seen);
  take(j, "quantile", c.quantile, seen);
  take(j, "output_dir", c.output_dir, seen);
  take(j, "master_seed", c.master_seed, seen);
  take(j, "threads", c.threads, seen);
  take(j, "bisection_tol", c.bisection_tol, seen);
  take(j, "sca_tol", c.sca_tol, seen);
  take(j, "sca_max_iters", c.sca_max_iters, seen);
  reject_unknown(j, seen, "config");
  return c;
}

nlohmann::json config_to_json(const ExperimentConfig& c) {
  return {{"scenario", scenario_to_json(c.scenario)},
          {"n_drops", c.n_drops},
          {"modes", c.modes},
          {"cp_gamma_bar0", c.cp_gamma_bar0},
          {"sp_gamma0", c.sp_gamma0},
          {"cp_sensing_thresholds", c.cp_sensing_thresholds},
          {"sp_sinr_thresholds", c.sp_sinr_thresholds},
          {"T_grid", c.T_grid},
          {"quantile", c.quantile},
          {"output_dir", c.output_dir},
          {"master_seed", c.master_seed},
          {"threads", c.threads},
          {"bisection_tol", c.bisection_tol},
          {"sca_tol", c.sca_tol},
          {"sca_max_iters", c.sca_max_iters}};
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open config file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse '" + path + "': " + e.what());
  }
  return config_from_json(j);
}

// ---------------------------------------------------------------- metrics

std::string format_value(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

namespace {

QosProblemSpec base_spec(const ExperimentConfig& c, QosMode mode) {
  QosProblemSpec s;
  s.mode = mode;
  s.bisection_tol = c.bisection_tol;
  s.sca_tol = c.sca_tol;
  s.sca_max_iters = c.sca_max_iters;
  return s;
}

std::string sanitize(std::string s) {
  for (char& ch : s)
    if (ch == ',' || ch == '\n' || ch == '\r' || ch == '"') ch = ' ';
  return s;
}

class RowSink {
 public:
  RowSink(int drop, std::vector<Row>& rows) : drop_(drop), rows_(rows) {}
  void add(const std::string& mode, const std::string& entity, const std::string& metric, double v) {
    rows_.push_back({drop_, mode, entity, metric, format_value(v)});
  }
  void add(const std::string& mode, const std::string& entity, const std::string& metric, const std::string& v) {
    rows_.push_back({drop_, mode, entity, metric, sanitize(v)});
  }

 private:
  int drop_;
  std::vector<Row>& rows_;
};

std::string ue(int k) { return "ue" + std::to_string(k); }
std::string region(int i) { return "region" + std::to_string(i); }

// Receive SNR of every region for one realization under `alloc`.
RVector receive_snrs(const Drop& d, const PowerAllocation& alloc) {
  const ScenarioConfig& c = d.sc.config;
  Rng rng = Rng(d.seed).child("realization");
  const ChannelSampler sampler(d.sc, d.corr, d.est, d.geom);
  const ChannelRealization real = sampler.sample(std::vector<bool>(c.S, true), rng);
  const TransmitSignals tx = generate_transmit_signals(d.sc, d.est, alloc, real, c.tau_s, rng);
  RVector out(c.S);
  for (int i = 0; i < c.S; ++i) {
    std::vector<CMatrix> D;
    for (int m : d.sc.targets.rx_aps_of_region[i]) D.push_back(target_channel(d.sc, d.geom, tx, i, m));
    const GlrtWorkspace ws = build_glrt_workspace(D, c.noise_power());
    out(i) = ws.total_rank > 0 ? receive_snr(ws, d.geom.rcs_cov[i]) : 0.0;
  }
  return out;
}

struct Summary {
  double min_rate = 0;
  double min_sensing_rate = 0;
};

Summary emit_metrics(RowSink& sink, const Drop& d, const std::string& mode, const PowerAllocation& comm,
                     bool with_leakage, double comm_scale, const PowerAllocation& sensing, double sensing_fraction,
                     bool with_receive_snr) {
  const ScenarioConfig& c = d.sc.config;
  Summary s;
  const RVector sinr = closed_form_sinr(d.terms, comm, with_leakage);
  s.min_rate = std::numeric_limits<double>::infinity();
  for (int k = 0; k < c.K; ++k) {
    const double rate = comm_scale * achievable_rate(sinr(k), c.tau_c, c.tau_p, c.bandwidth);
    sink.add(mode, ue(k), "sinr", sinr(k));
    sink.add(mode, ue(k), "rate", rate);
    s.min_rate = std::min(s.min_rate, rate);
  }
  const RVector snr = effective_snrs(d.sc, sensing, d.quad);
  s.min_sensing_rate = std::numeric_limits<double>::infinity();
  for (int i = 0; i < c.S; ++i) {
    const double rate = sensing_rate(snr(i), sensing_fraction, c.bandwidth);
    sink.add(mode, region(i), "effective_snr", snr(i));
    sink.add(mode, region(i), "sensing_rate", rate);
    s.min_sensing_rate = std::min(s.min_sensing_rate, rate);
  }
  if (with_receive_snr) {
    const RVector rx = receive_snrs(d, sensing);
    for (int i = 0; i < c.S; ++i) sink.add(mode, region(i), "receive_snr", rx(i));
  }
  sink.add(mode, "all", "min_rate", s.min_rate);
  sink.add(mode, "all", "min_sensing_rate", s.min_sensing_rate);
  return s;
}

void emit_allocation(RowSink& sink, const Drop& d, const std::string& mode, const PowerAllocation& a) {
  for (int m : d.sc.tx_aps) {
    const std::string ap = "@ap" + std::to_string(m);
    for (int k : d.sc.serving.ues_of_ap[m]) sink.add(mode, ue(k) + ap, "power", a.zeta(k, m) * a.zeta(k, m));
    for (int i : d.sc.targets.regions_of_ap[m]) sink.add(mode, region(i) + ap, "power", a.nu(i, m) * a.nu(i, m));
  }
}

void emit_result(RowSink& sink, const std::string& mode, const OptimizationResult& r) {
  sink.add(mode, "all", "status", to_string(r.status));
  sink.add(mode, "all", "objective", r.objective);
  sink.add(mode, "all", "probes", static_cast<double>(r.probes));
  sink.add(mode, "all", "socp_solves", static_cast<double>(r.socp_solves));
}

std::string sopc_mode(double T) { return "sopc_T=" + format_value(T); }

// Runs `work(drop)` over all drops on a worker pool and hands the records to
// `sink` in drop order as soon as each prefix is complete.
void for_each_drop(int n_drops, int threads, const std::function<DropRecord(int)>& work,
                   const std::function<void(DropRecord&&)>& sink) {
  int n_threads = threads > 0 ? threads : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  n_threads = std::min(n_threads, n_drops);
  std::vector<std::optional<DropRecord>> done(n_drops);
  std::mutex mu;
  std::atomic<int> next{0};
  int written = 0;
  std::exception_ptr failure;
  auto worker = [&] {
    for (;;) {
      const int id = next.fetch_add(1);
      if (id >= n_drops) return;
      DropRecord rec;
      try {
        rec = work(id);
      } catch (...) {
        std::lock_guard<std::mutex> lock(mu);
        if (!failure) failure = std::current_exception();
        next.store(n_drops);
        return;
      }
      std::lock_guard<std::mutex> lock(mu);
      done[id] = std::move(rec);
      while (written < n_drops && done[written]) {
        sink(std::move(*done[written]));
        done[written].reset();
        ++written;
      }
    }
  };
  if (n_threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int t = 0; t < n_threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failure) std::rethrow_exception(failure);
}

class CsvWriter {
 public:
  explicit CsvWriter(const fs::path& path) : path_(path), out_(path, std::ios::trunc) {
    if (!out_) throw IoError("cannot write '" + path.string() + "'");
    out_ << "drop_id,mode,entity_id,metric,value\n";
    check();
  }
  void write(const std::vector<Row>& rows) {
    for (const auto& r : rows) out_ << r.drop_id << ',' << r.mode << ',' << r.entity << ',' << r.metric << ',' << r.value << '\n';
    out_.flush();
    check();
  }

 private:
  void check() {
    if (!out_) throw IoError("write failed for '" + path_.string() + "'");
  }
  fs::path path_;
  std::ofstream out_;
};

fs::path prepare_output(const std::string& dir) {
  const fs::path p(dir);
  std::error_code ec;
  fs::create_directories(p, ec);
  if (ec || !fs::is_directory(p)) throw IoError("cannot create output directory '" + dir + "'");
  const fs::path probe = p / ".write_test";
  {
    std::ofstream f(probe);
    if (!f) throw IoError("output directory '" + dir + "' is not writable");
  }
  fs::remove(probe, ec);
  return p;
}

void write_manifest(const fs::path& dir, const ExperimentConfig& config, const std::string& command,
                    const std::vector<std::string>& files) {
  nlohmann::json m;
  m["command"] = command;
  m["config"] = config_to_json(config);
  m["master_seed"] = config.master_seed;
  m["drop_seeds"] = nlohmann::json::array();
  for (int d = 0; d < config.n_drops; ++d) m["drop_seeds"].push_back(drop_seed(config.master_seed, d));
  m["files"] = files;
  std::ofstream out(dir / "manifest.json", std::ios::trunc);
  if (!out) throw IoError("cannot write manifest");
  out << m.dump(2) << '\n';
  if (!out) throw IoError("cannot write manifest");
}

double elapsed_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

}  // namespace

DropRecord evaluate_drop(const ExperimentConfig& config, int drop_id) {
  const auto t0 = std::chrono::steady_clock::now();
  DropRecord rec;
  rec.drop_id = drop_id;
  RowSink sink(drop_id, rec.rows);
  const Drop d = build_drop(config.scenario, drop_seed(config.master_seed, drop_id), drop_id);
  const PowerControlInputs in = d.inputs();
  const ScenarioConfig& c = d.sc.config;
  const double joint_fraction = static_cast<double>(c.tau_s) / c.tau_c;

  for (const auto& mode : config.modes) {
    try {
      if (mode == "upc") {
        const PowerAllocation a = upc(d.sc);
        emit_metrics(sink, d, mode, a, true, 1.0, a, joint_fraction, true);
        emit_allocation(sink, d, mode, a);
      } else if (mode == "jopc_cp" || mode == "jopc_sp") {
        QosProblemSpec spec = base_spec(config, mode == "jopc_cp" ? QosMode::CommPrioritized : QosMode::SensingPrioritized);
        if (mode == "jopc_cp")
          spec.gamma_bar0 = config.cp_gamma_bar0;
        else
          spec.gamma0 = config.sp_gamma0;
        const OptimizationResult r = jopc(in, spec);
        emit_result(sink, mode, r);
        if (r.status != OptStatus::InfeasibleAtThreshold) {
          emit_metrics(sink, d, mode, r.allocation, true, 1.0, r.allocation, joint_fraction, true);
          emit_allocation(sink, d, mode, r.allocation);
        }
      } else if (mode == "sopc") {
        QosProblemSpec spec = base_spec(config, QosMode::CommOnly);
        spec.T = 0.5;  // both halves are solved once; T only rescales rates
        const SopcResult s = sopc(in, spec);
        emit_result(sink, "sopc_comm", s.comm);
        emit_result(sink, "sopc_sensing", s.sensing);
        emit_allocation(sink, d, "sopc_comm", s.comm.allocation);
        emit_allocation(sink, d, "sopc_sensing", s.sensing.allocation);
        for (double T : config.T_grid)
          emit_metrics(sink, d, sopc_mode(T), s.comm.allocation, false, 1.0 - T, s.sensing.allocation, T, false);
      }
    } catch (const std::exception& e) {
      sink.add(mode, "all", "error", e.what());
    }
  }
  rec.seconds = elapsed_since(t0);
  return rec;
}

std::vector<DropRecord> run_experiment(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir = prepare_output(config.output_dir);
  write_manifest(dir, config, "run", {"drops.csv"});
  CsvWriter csv(dir / "drops.csv");
  std::vector<DropRecord> records;
  for_each_drop(
      config.n_drops, config.threads, [&](int id) { return evaluate_drop(config, id); },
      [&](DropRecord&& r) {
        csv.write(r.rows);
        records.push_back(std::move(r));
      });
  return records;
}

// ---------------------------------------------------------------- statistics

std::vector<std::pair<double, double>> empirical_cdf(std::vector<double> values) {
  if (values.empty()) throw DomainError("empirical_cdf needs at least one value");
  std::sort(values.begin(), values.end());
  std::vector<std::pair<double, double>> out;
  const double n = static_cast<double>(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i + 1 < values.size() && values[i + 1] == values[i]) continue;
    out.emplace_back(values[i], static_cast<double>(i + 1) / n);
  }
  return out;
}

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw DomainError("quantile needs at least one value");
  if (!(q > 0 && q <= 1)) throw DomainError("quantile level must lie in (0, 1]");
  std::sort(values.begin(), values.end());
  const auto n = static_cast<double>(values.size());
  std::size_t idx = static_cast<std::size_t>(std::ceil(q * n - 1e-12));
  idx = std::clamp<std::size_t>(idx, 1, values.size());
  return values[idx - 1];
}

// ---------------------------------------------------------------- region

RegionResult cs_region(const ExperimentConfig& config) {
  config.validate();
  const fs::path dir = prepare_output(config.output_dir);
  write_manifest(dir, config, "region", {"region.csv", "region_points.csv"});
  CsvWriter csv(dir / "region.csv");

  struct Sample {
    bool feasible = false;
    double rate = 0;
    double sensing = 0;
  };
  // branch -> parameter -> per-drop samples
  std::map<std::string, std::map<double, std::vector<Sample>>> samples;
  RegionResult result;

  auto work = [&](int id) {
    const auto t0 = std::chrono::steady_clock::now();
    DropRecord rec;
    rec.drop_id = id;
    RowSink sink(id, rec.rows);
    const Drop d = build_drop(config.scenario, drop_seed(config.master_seed, id), id);
    const PowerControlInputs in = d.inputs();
    const ScenarioConfig& c = d.sc.config;
    const double fraction = static_cast<double>(c.tau_s) / c.tau_c;
    auto record = [&](const std::string& branch, double param, const OptimizationResult& r) {
      const std::string entity = "threshold=" + format_value(param);
      sink.add(branch, entity, "status", to_string(r.status));
      if (r.status == OptStatus::InfeasibleAtThreshold) return;
      const double rate = achievable_rate(min_sinr(d.terms, r.allocation, true), c.tau_c, c.tau_p, c.bandwidth);
      const double sens = sensing_rate(min_effective_snr(d.sc, d.quad, r.allocation), fraction, c.bandwidth);
      sink.add(branch, entity, "min_rate", rate);
      sink.add(branch, entity, "min_sensing_rate", sens);
    };
    for (double g : config.cp_sensing_thresholds) {
      QosProblemSpec spec = base_spec(config, QosMode::CommPrioritized);
      spec.gamma_bar0 = g;
      record("jopc_cp", g, jopc(in, spec));
    }
    for (double g : config.sp_sinr_thresholds) {
      QosProblemSpec spec = base_spec(config, QosMode::SensingPrioritized);
      spec.gamma0 = g;
      record("jopc_sp", g, jopc(in, spec));
    }
    if (!config.T_grid.empty()) {
      QosProblemSpec spec = base_spec(config, QosMode::CommOnly);
      spec.T = 0.5;
      const SopcResult s = sopc(in, spec);
      const double comm_rate = achievable_rate(min_sinr(d.terms, s.comm.allocation, false), c.tau_c, c.tau_p, c.bandwidth);
      const double sens_snr = min_effective_snr(d.sc, d.quad, s.sensing.allocation);
      const bool ok = s.comm.status != OptStatus::InfeasibleAtThreshold &&
                      s.sensing.status != OptStatus::InfeasibleAtThreshold;
      for (double T : config.T_grid) {
        const std::string entity = "T=" + format_value(T);
        sink.add("sopc", entity, "status", ok ? "optimal" : "infeasible_at_threshold");
        sink.add("sopc", entity, "min_rate", (1.0 - T) * comm_rate);
        sink.add("sopc", entity, "min_sensing_rate", sensing_rate(sens_snr, T, c.bandwidth));
      }
    }
    rec.seconds = elapsed_since(t0);
    return rec;
  };

  for_each_drop(config.n_drops, config.threads, work, [&](DropRecord&& r) {
    csv.write(r.rows);
    std::map<std::pair<std::string, std::string>, Sample> per_entity;
    for (const auto& row : r.rows) {
      Sample& s = per_entity[{row.mode, row.entity}];
      if (row.metric == "status") s.feasible = row.value != "infeasible_at_threshold";
      if (row.metric == "min_rate") s.rate = std::stod(row.value);
      if (row.metric == "min_sensing_rate") s.sensing = std::stod(row.value);
    }
    for (const auto& [key, s] : per_entity) {
      const std::string& entity = key.second;
      const double param = std::stod(entity.substr(entity.find('=') + 1));
      samples[key.first][param].push_back(s);
    }
    result.records.push_back(std::move(r));
  });

  for (const auto& [branch, by_param] : samples) {
    for (const auto& [param, list] : by_param) {
      RegionPoint p;
      p.branch = branch;
      p.parameter = param;
      std::vector<double> rates, sens;
      for (const auto& s : list)
        if (s.feasible) {
          rates.push_back(s.rate);
          sens.push_back(s.sensing);
        }
      p.feasible_fraction = static_cast<double>(rates.size()) / static_cast<double>(list.size());
      p.kept = !rates.empty() && 2 * rates.size() >= list.size();
      if (p.kept) {
        p.rate = quantile(rates, config.quantile);
        p.sensing_rate = quantile(sens, config.quantile);
      }
      result.points.push_back(p);
    }
  }
  // Both prioritised branches trace one joint curve.
  auto curve = [](const std::string& branch) { return branch == "sopc" ? 1 : 0; };
  for (auto& p : result.points) {
    if (!p.kept) continue;
    p.boundary = std::none_of(result.points.begin(), result.points.end(), [&](const RegionPoint& o) {
      return o.kept && curve(o.branch) == curve(p.branch) && o.rate >= p.rate && o.sensing_rate >= p.sensing_rate &&
             (o.rate > p.rate || o.sensing_rate > p.sensing_rate);
    });
  }

  std::ofstream pts(dir / "region_points.csv", std::ios::trunc);
  if (!pts) throw IoError("cannot write region_points.csv");
  pts << "branch,parameter,rate_quantile,sensing_rate_quantile,feasible_fraction,kept,boundary\n";
  for (const auto& p : result.points)
    pts << p.branch << ',' << format_value(p.parameter) << ',' << format_value(p.rate) << ','
        << format_value(p.sensing_rate) << ',' << format_value(p.feasible_fraction) << ',' << (p.kept ? 1 : 0) << ','
        << (p.boundary ? 1 : 0) << '\n';
  if (!pts) throw IoError("write failed for region_points.csv");
  return result;
}

void write_cdfs(const ExperimentConfig& config, const std::vector<DropRecord>& records) {
  const fs::path dir = prepare_output(config.output_dir);
  std::map<std::pair<std::string, std::string>, std::vector<double>> pooled;
  for (const auto& r : records)
    for (const auto& row : r.rows)
      if (row.metric == "rate" || row.metric == "sensing_rate" || row.metric == "min_rate")
        pooled[{row.mode, row.metric}].push_back(std::stod(row.value));
  std::ofstream out(dir / "cdf.csv", std::ios::trunc);
  if (!out) throw IoError("cannot write cdf.csv");
  out << "mode,metric,value,probability\n";
  for (const auto& [key, values] : pooled)
    for (const auto& [v, p] : empirical_cdf(values))
      out << key.first << ',' << key.second << ',' << format_value(v) << ',' << format_value(p) << '\n';
  if (!out) throw IoError("write failed for cdf.csv");
}

}  // namespace cfisac

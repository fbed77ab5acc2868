#include "cfisac/power_control.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace cfisac {

std::string to_string(QosMode mode) {
  switch (mode) {
    case QosMode::CommPrioritized:
      return "comm_prioritized";
    case QosMode::SensingPrioritized:
      return "sensing_prioritized";
    case QosMode::CommOnly:
      return "comm_only";
    case QosMode::SensingOnly:
      return "sensing_only";
  }
  return "unknown";
}

std::string to_string(OptStatus status) {
  switch (status) {
    case OptStatus::Optimal:
      return "optimal";
    case OptStatus::InfeasibleAtThreshold:
      return "infeasible_at_threshold";
    case OptStatus::NotConverged:
      return "not_converged";
  }
  return "unknown";
}

void QosProblemSpec::validate() const {
  if (!(bisection_tol > 0) || !(sca_tol > 0)) throw ConfigError("tolerances must be positive");
  if (sca_max_iters < 1) throw ConfigError("sca_max_iters must be at least 1");
  if (!(gamma0 >= 0) || !(gamma_bar0 >= 0)) throw ConfigError("thresholds must be nonnegative");
  if (mode == QosMode::CommPrioritized && gamma0 != 0) throw ConfigError("comm-prioritized mode takes gamma_bar0 only");
  if (mode == QosMode::SensingPrioritized && gamma_bar0 != 0)
    throw ConfigError("sensing-prioritized mode takes gamma0 only");
  if (!(T >= 0 && T <= 1)) throw DomainError("time fraction T must lie in [0, 1]");
}

PowerAllocation upc(const Scenario& sc) {
  PowerAllocation a = PowerAllocation::zeros(sc);
  for (int m : sc.tx_aps) {
    const auto& Km = sc.serving.ues_of_ap[m];
    const auto& Sm = sc.targets.regions_of_ap[m];
    const double P = sc.power_budget[m];
    double comm = Km.empty() ? 0.0 : (Sm.empty() ? P : 0.5 * P);
    double sense = Sm.empty() ? 0.0 : (Km.empty() ? P : 0.5 * P);
    for (int k : Km) a.zeta(k, m) = std::sqrt(comm / static_cast<double>(Km.size()));
    for (int i : Sm) a.nu(i, m) = std::sqrt(sense / static_cast<double>(Sm.size()));
  }
  return a;
}

double min_sinr(const SinrTerms& terms, const PowerAllocation& alloc, bool with_leakage) {
  return closed_form_sinr(terms, alloc, with_leakage).minCoeff();
}

double min_effective_snr(const Scenario& sc, const std::vector<SensingQuadratic>& quad, const PowerAllocation& alloc) {
  if (quad.empty()) return std::numeric_limits<double>::infinity();
  return effective_snrs(sc, alloc, quad).minCoeff();
}

namespace {

// Maps allocation entries to optimisation variables (-1 when absent).
struct VariableMap {
  int K = 0, S = 0, M = 0;
  std::vector<int> zeta;  // k * M + m
  std::vector<int> nu;    // i * M + m
  std::vector<std::vector<int>> ap_vars;
  int n = 0;

  int z(int k, int m) const { return zeta[k * M + m]; }
  int v(int i, int m) const { return nu[i * M + m]; }
};

VariableMap structural_map(const Scenario& sc, bool with_zeta, bool with_nu) {
  VariableMap vm;
  vm.K = sc.config.K;
  vm.S = sc.config.S;
  vm.M = sc.config.M;
  vm.zeta.assign(vm.K * vm.M, -1);
  vm.nu.assign(vm.S * vm.M, -1);
  vm.ap_vars.assign(vm.M, {});
  for (int m : sc.tx_aps) {
    if (with_zeta)
      for (int k : sc.serving.ues_of_ap[m]) {
        vm.zeta[k * vm.M + m] = vm.n;
        vm.ap_vars[m].push_back(vm.n++);
      }
    if (with_nu)
      for (int i : sc.targets.regions_of_ap[m]) {
        vm.nu[i * vm.M + m] = vm.n;
        vm.ap_vars[m].push_back(vm.n++);
      }
  }
  return vm;
}

// Same layout as PowerAllocation::stacked.
VariableMap stacked_map(const Scenario& sc) {
  VariableMap vm;
  vm.K = sc.config.K;
  vm.S = sc.config.S;
  vm.M = sc.config.M;
  vm.zeta.assign(vm.K * vm.M, -1);
  vm.nu.assign(vm.S * vm.M, -1);
  vm.ap_vars.assign(vm.M, {});
  for (int t = 0; t < sc.num_tx(); ++t) {
    const int m = sc.tx_aps[t];
    for (int k = 0; k < vm.K; ++k) {
      vm.zeta[k * vm.M + m] = vm.n;
      vm.ap_vars[m].push_back(vm.n++);
    }
    for (int i = 0; i < vm.S; ++i) {
      vm.nu[i * vm.M + m] = vm.n;
      vm.ap_vars[m].push_back(vm.n++);
    }
  }
  return vm;
}

RVector to_vector(const VariableMap& vm, const PowerAllocation& a) {
  RVector x = RVector::Zero(vm.n);
  for (int k = 0; k < vm.K; ++k)
    for (int m = 0; m < vm.M; ++m)
      if (vm.z(k, m) >= 0) x(vm.z(k, m)) = a.zeta(k, m);
  for (int i = 0; i < vm.S; ++i)
    for (int m = 0; m < vm.M; ++m)
      if (vm.v(i, m) >= 0) x(vm.v(i, m)) = a.nu(i, m);
  return x;
}

// Clamps negatives and pulls every AP back onto its budget.
PowerAllocation to_allocation(const Scenario& sc, const VariableMap& vm, const RVector& x) {
  PowerAllocation a = PowerAllocation::zeros(sc);
  for (int k = 0; k < vm.K; ++k)
    for (int m = 0; m < vm.M; ++m)
      if (vm.z(k, m) >= 0) a.zeta(k, m) = std::max(0.0, x(vm.z(k, m)));
  for (int i = 0; i < vm.S; ++i)
    for (int m = 0; m < vm.M; ++m)
      if (vm.v(i, m) >= 0) a.nu(i, m) = std::max(0.0, x(vm.v(i, m)));
  for (int m : sc.tx_aps) {
    const double p = a.ap_power(m);
    if (p > sc.power_budget[m]) {
      const double scale = std::sqrt(sc.power_budget[m] / p);
      a.zeta.col(m) *= scale;
      a.nu.col(m) *= scale;
    }
  }
  return a;
}

socp::SocConstraint c3_cone(const Scenario& sc, const SinrTerms& t, const VariableMap& vm, int k, double gamma,
                            bool with_leakage) {
  const double sigma = std::sqrt(t.noise);
  std::vector<RVector> rows;
  auto unit_row = [&](int idx, double coef) {
    RVector r = RVector::Zero(vm.n);
    r(idx) = coef / sigma;
    rows.push_back(std::move(r));
  };
  for (int j = 0; j < t.K; ++j)
    for (int m : sc.serving.aps_of_ue[j]) {
      const int idx = vm.z(j, m);
      const double c = t.beamforming[k](j, m);
      if (idx >= 0 && c > 0) unit_row(idx, std::sqrt(c));
    }
  for (int j = 0; j < t.K; ++j) {
    if (j == k) continue;
    RVector re = RVector::Zero(vm.n), im = RVector::Zero(vm.n);
    bool any = false;
    for (int m : sc.serving.aps_of_ue[j]) {
      const int idx = vm.z(j, m);
      const cdouble c = t.contamination[k](j, m);
      if (idx < 0 || c == 0.0) continue;
      re(idx) = c.real() / sigma;
      im(idx) = c.imag() / sigma;
      any = true;
    }
    if (any) {
      rows.push_back(std::move(re));
      rows.push_back(std::move(im));
    }
  }
  if (with_leakage)
    for (int m : sc.tx_aps)
      for (int i : sc.targets.regions_of_ap[m]) {
        const int idx = vm.v(i, m);
        const double c = t.leakage[k](i, m);
        if (idx >= 0 && c > 0) unit_row(idx, std::sqrt(c));
      }
  RVector num = RVector::Zero(vm.n);
  for (int m : sc.serving.aps_of_ue[k]) {
    const int idx = vm.z(k, m);
    if (idx >= 0) num(idx) = t.useful(k, m) / sigma;
  }
  socp::SocConstraint cone;
  const int n_rows = static_cast<int>(rows.size()) + 2;
  cone.A = RMatrix::Zero(n_rows, vm.n);
  cone.b = RVector::Zero(n_rows);
  for (std::size_t r = 0; r < rows.size(); ++r) cone.A.row(r) = rows[r].transpose();
  cone.b(static_cast<Eigen::Index>(rows.size())) = 1.0;  // sigma_z / sigma_z
  cone.A.row(n_rows - 1) = num.transpose();
  cone.c = std::sqrt(1.0 + 1.0 / gamma) * num;
  cone.d = 0;
  return cone;
}

// sum_m b_m^T F_m b_m restricted to the mapped variables, as a diagonal weight per variable.
RVector sensing_weights(const Scenario& sc, const VariableMap& vm, const SensingQuadratic& q) {
  RVector w = RVector::Zero(vm.n);
  const int K = sc.config.K;
  for (int t = 0; t < sc.num_tx(); ++t) {
    const int m = sc.tx_aps[t];
    const RMatrix& F = q.F[t];
    for (int k = 0; k < K; ++k)
      if (vm.z(k, m) >= 0) w(vm.z(k, m)) = F(k, k);
    for (int i = 0; i < sc.config.S; ++i)
      if (vm.v(i, m) >= 0) w(vm.v(i, m)) = F(K + i, K + i);
  }
  return w;
}

constexpr double kLevelMargin = 1e-6;  // relative tightening of the bisected constraint
constexpr double kHardMargin = 1e-7;   // relative tightening of hard QoS floors

class QosEngine {
 public:
  QosEngine(const PowerControlInputs& in, const QosProblemSpec& spec) : in_(in), spec_(spec) {
    spec_.validate();
    switch (spec_.mode) {
      case QosMode::SensingPrioritized:
        sensing_objective_ = true;
        with_zeta_ = with_nu_ = with_leakage_ = true;
        hard_gamma0_ = spec_.gamma0;
        break;
      case QosMode::SensingOnly:
        sensing_objective_ = true;
        with_nu_ = true;
        break;
      case QosMode::CommPrioritized:
        with_zeta_ = with_leakage_ = true;
        // Without a sensing floor the beams only add interference.
        with_nu_ = spec_.gamma_bar0 > 0;
        hard_gamma_bar0_ = spec_.gamma_bar0;
        break;
      case QosMode::CommOnly:
        with_zeta_ = true;
        break;
    }
    vm_ = structural_map(in_.sc, with_zeta_, with_nu_);
    if (hard_gamma_bar0_ > 0 || sensing_objective_)
      for (const auto& q : in_.quad) weights_.push_back(sensing_weights(in_.sc, vm_, q));
    tol_.slack_floor = 1.0;
  }

  bool convex() const { return !sensing_objective_ && hard_gamma_bar0_ == 0; }

  double objective(const PowerAllocation& a) const {
    return sensing_objective_ ? min_effective_snr(in_.sc, in_.quad, a) : min_sinr(in_.terms, a, with_leakage_);
  }

  bool hard_ok(const PowerAllocation& a) const {
    if (!a.respects_structure(in_.sc) || !a.within_budget(in_.sc, 1e-9)) return false;
    if (!with_nu_ && a.nu.cwiseAbs().maxCoeff() > 0) return false;
    if (!with_zeta_ && a.zeta.cwiseAbs().maxCoeff() > 0) return false;
    if (hard_gamma0_ > 0 && min_sinr(in_.terms, a, with_leakage_) < hard_gamma0_ * (1 - kHardMargin)) return false;
    if (hard_gamma_bar0_ > 0 && min_effective_snr(in_.sc, in_.quad, a) < hard_gamma_bar0_ * (1 - kHardMargin))
      return false;
    return true;
  }

  // Restricts an allocation to the variables this design may use.
  PowerAllocation restrict(const PowerAllocation& a) const { return to_allocation(in_.sc, vm_, to_vector(vm_, a)); }

  double upper_bound() const {
    const Scenario& sc = in_.sc;
    double ub = std::numeric_limits<double>::infinity();
    if (sensing_objective_) {
      for (std::size_t i = 0; i < in_.quad.size(); ++i) {
        double e = 0;
        for (int m : sc.tx_aps) {
          double wmax = 0;
          for (int idx : vm_.ap_vars[m]) wmax = std::max(wmax, weights_[i](idx));
          e += sc.power_budget[m] * wmax;
        }
        ub = std::min(ub, e / in_.quad[i].normalizer);
      }
    } else {
      for (int k = 0; k < in_.terms.K; ++k) {
        double amp = 0;
        for (int m : sc.serving.aps_of_ue[k]) amp += std::sqrt(sc.power_budget[m]) * in_.terms.useful(k, m);
        ub = std::min(ub, amp * amp / in_.terms.noise);
      }
    }
    return ub;
  }

  socp::Problem build_hard(const RVector& b_prev, const std::vector<double>& q_prev) const {
    const Scenario& sc = in_.sc;
    socp::Problem p(vm_.n);
    p.nonneg.assign(vm_.n, true);
    for (int m : sc.tx_aps) {
      const auto& vars = vm_.ap_vars[m];
      if (vars.empty()) continue;
      socp::SocConstraint c1;
      c1.A = RMatrix::Zero(static_cast<Eigen::Index>(vars.size()), vm_.n);
      for (std::size_t r = 0; r < vars.size(); ++r) c1.A(r, vars[r]) = 1.0;
      c1.b = RVector::Zero(static_cast<Eigen::Index>(vars.size()));
      c1.c = RVector::Zero(vm_.n);
      c1.d = std::sqrt(sc.power_budget[m]);
      c1.relaxable = false;
      p.cones.push_back(std::move(c1));
    }
    if (hard_gamma0_ > 0)
      for (int k = 0; k < in_.terms.K; ++k) {
        auto cone = c3_cone(sc, in_.terms, vm_, k, hard_gamma0_ * (1 + kHardMargin), with_leakage_);
        cone.relaxable = false;
        p.cones.push_back(std::move(cone));
      }
    if (hard_gamma_bar0_ > 0)
      for (std::size_t i = 0; i < in_.quad.size(); ++i)
        p.linear.push_back(c2_row(i, hard_gamma_bar0_ * (1 + kHardMargin), b_prev, q_prev[i], false));
    return p;
  }

  socp::Problem build(double level, const RVector& b_prev, const std::vector<double>& q_prev) const {
    const Scenario& sc = in_.sc;
    socp::Problem p = build_hard(b_prev, q_prev);
    const double target = level * (1 + kLevelMargin);
    if (sensing_objective_) {
      for (std::size_t i = 0; i < in_.quad.size(); ++i) p.linear.push_back(c2_row(i, target, b_prev, q_prev[i], true));
    } else {
      for (int k = 0; k < in_.terms.K; ++k) p.cones.push_back(c3_cone(sc, in_.terms, vm_, k, target, with_leakage_));
    }
    return p;
  }

  struct Probe {
    bool feasible = false;
    PowerAllocation best;
    double best_value = 0;
  };

  // SCA from a start satisfying the hard constraints.
  Probe probe(double level, const PowerAllocation& start, OptimizationResult* stats) const {
    Probe out;
    out.best = start;
    out.best_value = objective(start);
    if (out.best_value >= level) {
      out.feasible = true;
      return out;
    }
    PowerAllocation current = start;
    double current_value = out.best_value;
    const int iters = convex() ? 1 : spec_.sca_max_iters;
    for (int it = 0; it < iters; ++it) {
      const RVector b_prev = to_vector(vm_, current);
      std::vector<double> q_prev;
      for (const auto& w : weights_) q_prev.push_back(b_prev.dot(w.cwiseProduct(b_prev)));
      const socp::Solution sol = socp::solve_feasibility(build(level, b_prev, q_prev), tol_);
      if (stats) ++stats->socp_solves;
      if (sol.status == socp::Status::MaxIterations) break;
      PowerAllocation cand = to_allocation(in_.sc, vm_, sol.x);
      if (!hard_ok(cand)) break;
      double v = objective(cand);
      if (v < current_value && !damp(current, current_value, cand, v)) break;
      if (stats) stats->trace.push_back(v);
      if (v > out.best_value) {
        out.best = cand;
        out.best_value = v;
      }
      if (v >= level) {
        out.feasible = true;
        return out;
      }
      if (sol.status == socp::Status::Infeasible && convex()) break;
      const double change = std::abs(v - current_value) / std::max(std::abs(current_value), 1e-300);
      current = cand;
      current_value = v;
      if (change < spec_.sca_tol) break;
    }
    return out;
  }

  // Backtracks from `cand` towards `current` on the segment between them, which
  // meets the hard constraints, until the verified objective improves.
  bool damp(const PowerAllocation& current, double current_value, PowerAllocation& cand, double& v) const {
    const RVector b0 = to_vector(vm_, current);
    const RVector step = to_vector(vm_, cand) - b0;
    for (double t = 0.5; t > 1e-6; t *= 0.5) {
      const PowerAllocation trial = to_allocation(in_.sc, vm_, b0 + t * step);
      if (!hard_ok(trial)) continue;
      const double tv = objective(trial);
      if (tv > current_value) {
        cand = trial;
        v = tv;
        return true;
      }
    }
    return false;
  }

  // A point meeting the hard constraints that leans towards the objective.
  bool hard_feasible_start(PowerAllocation& out, OptimizationResult* stats) const {
    socp::Problem p = build_hard(RVector::Zero(vm_.n), std::vector<double>(in_.quad.size(), 0.0));
    p.objective = RVector::Zero(vm_.n);
    for (int i = 0; i < vm_.S; ++i)
      for (int m = 0; m < vm_.M; ++m)
        if (vm_.v(i, m) >= 0) p.objective(vm_.v(i, m)) = -1.0;
    const socp::Solution sol = socp::solve(p, tol_);
    if (stats) ++stats->socp_solves;
    if (sol.status != socp::Status::Optimal) return false;
    out = to_allocation(in_.sc, vm_, sol.x);
    return hard_ok(out);
  }

  const VariableMap& map() const { return vm_; }
  bool sensing_objective() const { return sensing_objective_; }
  double hard_gamma_bar0() const { return hard_gamma_bar0_; }

 private:
  socp::LinearInequality c2_row(std::size_t i, double level, const RVector& b_prev, double q_prev,
                                bool relaxable) const {
    // q(b_prev) + 2 (F b_prev)^T (b - b_prev) >= level * normaliser, scaled to relative units.
    const double scale = level * in_.quad[i].normalizer;
    socp::LinearInequality row;
    row.g = -2.0 * weights_[i].cwiseProduct(b_prev) / scale;
    row.h = -1.0 - q_prev / scale;
    row.relaxable = relaxable;
    return row;
  }

  const PowerControlInputs& in_;
  QosProblemSpec spec_;
  bool sensing_objective_ = false;
  bool with_zeta_ = false;
  bool with_nu_ = false;
  bool with_leakage_ = false;
  double hard_gamma0_ = 0;
  double hard_gamma_bar0_ = 0;
  VariableMap vm_;
  std::vector<RVector> weights_;
  socp::Tolerances tol_;
};

// Uniform split of the full budget over the sets the design may use.
PowerAllocation full_budget_split(const Scenario& sc, bool comm) {
  PowerAllocation a = PowerAllocation::zeros(sc);
  for (int m : sc.tx_aps) {
    const auto& Km = sc.serving.ues_of_ap[m];
    const auto& Sm = sc.targets.regions_of_ap[m];
    if (comm && !Km.empty())
      for (int k : Km) a.zeta(k, m) = std::sqrt(sc.power_budget[m] / static_cast<double>(Km.size()));
    if (!comm && !Sm.empty())
      for (int i : Sm) a.nu(i, m) = std::sqrt(sc.power_budget[m] / static_cast<double>(Sm.size()));
  }
  return a;
}

constexpr int kMaxProbes = 100;

OptimizationResult run_bisection(const PowerControlInputs& in, const QosProblemSpec& spec,
                                 const std::vector<PowerAllocation>& warm_starts) {
  const QosEngine engine(in, spec);
  OptimizationResult res;

  std::vector<PowerAllocation> starts;
  const PowerAllocation base = upc(in.sc);
  starts.push_back(engine.restrict(base));
  if (spec.mode == QosMode::CommOnly || spec.mode == QosMode::CommPrioritized)
    starts.push_back(engine.restrict(full_budget_split(in.sc, true)));
  if (spec.mode == QosMode::SensingOnly) starts.push_back(engine.restrict(full_budget_split(in.sc, false)));
  for (const auto& w : warm_starts) starts.push_back(engine.restrict(w));
  if (spec.mode == QosMode::SensingPrioritized && spec.gamma0 == 0) {
    // The sensing-only optimum is feasible here and seeds a second start.
    QosProblemSpec so = spec;
    so.mode = QosMode::SensingOnly;
    const OptimizationResult r = run_bisection(in, so, {});
    res.socp_solves += r.socp_solves;
    if (r.status != OptStatus::InfeasibleAtThreshold) starts.push_back(engine.restrict(r.allocation));
  }

  bool have_start = false;
  PowerAllocation best;
  double lo = 0;
  for (const auto& s : starts) {
    if (!engine.hard_ok(s)) continue;
    const double v = engine.objective(s);
    if (!have_start || v > lo) {
      best = s;
      lo = v;
      have_start = true;
    }
  }

  if (!have_start && engine.hard_gamma_bar0() > 0) {
    // Reach the sensing floor first with the sensing-prioritised machinery.
    QosProblemSpec sp = spec;
    sp.mode = QosMode::SensingPrioritized;
    sp.gamma0 = 0;
    sp.gamma_bar0 = 0;
    const QosEngine sensing(in, sp);
    PowerAllocation seed = sensing.restrict(base);
    {
      const PowerAllocation alt = sensing.restrict(full_budget_split(in.sc, false));
      if (sensing.objective(alt) > sensing.objective(seed)) seed = alt;
    }
    for (const auto& w : warm_starts) {
      const PowerAllocation r = sensing.restrict(w);
      if (sensing.objective(r) > sensing.objective(seed)) seed = r;
    }
    const auto pr = sensing.probe(spec.gamma_bar0 * (1 + kHardMargin), seed, &res);
    if (pr.feasible && engine.hard_ok(pr.best)) {
      best = pr.best;
      lo = engine.objective(best);
      have_start = true;
    }
  } else if (!have_start) {
    PowerAllocation s;
    if (engine.hard_feasible_start(s, &res)) {
      best = s;
      lo = engine.objective(s);
      have_start = true;
    }
  }
  res.trace.clear();
  if (!have_start) {
    res.status = OptStatus::InfeasibleAtThreshold;
    res.allocation = PowerAllocation::zeros(in.sc);
    return res;
  }

  const double ub = engine.upper_bound();
  double hi = ub;
  bool converged = false;
  while (res.probes < kMaxProbes) {
    if (!(hi > lo * (1 + spec.bisection_tol))) {
      converged = true;
      break;
    }
    const double level = std::sqrt(std::max(lo, hi * 1e-12) * hi);
    ++res.probes;
    const auto pr = engine.probe(level, best, &res);
    if (pr.best_value > lo) {
      best = pr.best;
      lo = pr.best_value;
    }
    if (!pr.feasible) hi = level;
    if (lo >= hi) hi = std::max(ub, lo * (1 + 2 * spec.bisection_tol));
  }
  res.allocation = best;
  res.objective = lo;
  res.upper_level = hi;
  res.status = converged ? OptStatus::Optimal : OptStatus::NotConverged;
  return res;
}

}  // namespace

std::vector<socp::SocConstraint> build_soc_c3(const Scenario& sc, const SinrTerms& terms, double gamma0,
                                              bool with_leakage) {
  if (!(gamma0 > 0)) throw DomainError("gamma0 must be positive");
  const VariableMap vm = stacked_map(sc);
  std::vector<socp::SocConstraint> out;
  for (int k = 0; k < terms.K; ++k) out.push_back(c3_cone(sc, terms, vm, k, gamma0, with_leakage));
  return out;
}

AffineMinorant sca_linearize(const SensingQuadratic& q, const RVector& b_prev) {
  AffineMinorant f;
  f.b_prev = b_prev;
  f.gradient = RVector::Zero(b_prev.size());
  const int L = q.F.empty() ? 0 : static_cast<int>(q.F[0].rows());
  for (std::size_t c = 0; c < q.F.size(); ++c) {
    const auto seg = b_prev.segment(static_cast<Eigen::Index>(c) * L, L);
    f.gradient.segment(static_cast<Eigen::Index>(c) * L, L) = 2.0 * q.F[c] * seg;
  }
  f.value_at_prev = sensing_energy(q, b_prev);
  return f;
}

OptimizationResult jopc(const PowerControlInputs& in, const QosProblemSpec& spec,
                        const std::vector<PowerAllocation>& warm_starts) {
  if (spec.mode != QosMode::CommPrioritized && spec.mode != QosMode::SensingPrioritized)
    throw ConfigError("jopc expects a prioritised mode");
  return run_bisection(in, spec, warm_starts);
}

bool probe_level(const PowerControlInputs& in, const QosProblemSpec& spec, double level, const PowerAllocation& start) {
  const QosEngine engine(in, spec);
  if (!engine.hard_ok(start)) return false;
  return engine.probe(level, start, nullptr).feasible;
}

SopcResult sopc(const PowerControlInputs& in, const QosProblemSpec& spec) {
  spec.validate();
  SopcResult out;
  out.T = spec.T;
  QosProblemSpec s = spec;
  s.gamma0 = 0;
  s.gamma_bar0 = 0;
  if (spec.T < 1) {
    s.mode = QosMode::CommOnly;
    out.comm = run_bisection(in, s, {});
  } else {
    out.comm.allocation = PowerAllocation::zeros(in.sc);
    out.comm.status = OptStatus::Optimal;
  }
  if (spec.T > 0) {
    s.mode = QosMode::SensingOnly;
    out.sensing = run_bisection(in, s, {});
  } else {
    out.sensing.allocation = PowerAllocation::zeros(in.sc);
    out.sensing.status = OptStatus::Optimal;
  }
  return out;
}

}  // namespace cfisac

#pragma once

#include "cfisac/comm_metrics.hpp"
#include "cfisac/common.hpp"
#include "cfisac/scenario.hpp"
#include "cfisac/sensing.hpp"
#include "cfisac/socp.hpp"

#include <string>
#include <vector>

namespace cfisac {

enum class QosMode { CommPrioritized, SensingPrioritized, CommOnly, SensingOnly };

std::string to_string(QosMode mode);

struct QosProblemSpec {
  QosMode mode = QosMode::CommPrioritized;
  double gamma0 = 0;      // SINR floor, used by SensingPrioritized
  double gamma_bar0 = 0;  // effective-SNR floor, used by CommPrioritized
  double bisection_tol = 1e-3;
  double sca_tol = 1e-4;
  int sca_max_iters = 30;
  double T = 1.0;  // sensing time fraction, orthogonal design only

  void validate() const;
};

enum class OptStatus { Optimal, InfeasibleAtThreshold, NotConverged };

std::string to_string(OptStatus status);

struct OptimizationResult {
  PowerAllocation allocation;
  double objective = 0;  // verified min SINR or min effective SNR
  OptStatus status = OptStatus::NotConverged;
  std::vector<double> trace;  // verified objective of every SCA iterate, in order
  double upper_level = 0;     // smallest level whose probe failed (or the analytic bound)
  int probes = 0;
  int socp_solves = 0;
};

/// Per-drop statistics consumed by the optimizers.
struct PowerControlInputs {
  const Scenario& sc;
  const SinrTerms& terms;
  const std::vector<SensingQuadratic>& quad;
};

/// Half of P_m to communication split equally over K_m, half to sensing over
/// S_m; an empty set donates its half.
PowerAllocation upc(const Scenario& sc);

double min_sinr(const SinrTerms& terms, const PowerAllocation& alloc, bool with_leakage = true);
double min_effective_snr(const Scenario& sc, const std::vector<SensingQuadratic>& quad, const PowerAllocation& alloc);

/// C3 cones over the stacked vector b (PowerAllocation::stacked order), one per
/// UE: ||rho_k(b)|| <= sqrt(1 + 1/gamma0) sum_m zeta_{k,m} sqrt(tr Phi_{k,m}).
/// Rows are normalised by sigma_z.
std::vector<socp::SocConstraint> build_soc_c3(const Scenario& sc, const SinrTerms& terms, double gamma0,
                                              bool with_leakage = true);

/// First-order expansion of q(b) = sum_m b_m^T F_m b_m around b_prev.
struct AffineMinorant {
  RVector gradient;
  RVector b_prev;
  double value_at_prev = 0;
  double operator()(const RVector& b) const { return value_at_prev + gradient.dot(b - b_prev); }
};

AffineMinorant sca_linearize(const SensingQuadratic& q, const RVector& b_prev);

/// Joint design: bisection on the prioritised metric with SCA probes.
/// Extra warm starts are used when they satisfy the hard constraints and
/// beat UPC's verified objective.
OptimizationResult jopc(const PowerControlInputs& in, const QosProblemSpec& spec,
                        const std::vector<PowerAllocation>& warm_starts = {});

/// Runs one bisection probe at `level` from `start`; true when a point meeting
/// the level was verified.
bool probe_level(const PowerControlInputs& in, const QosProblemSpec& spec, double level, const PowerAllocation& start);

struct SopcResult {
  OptimizationResult comm;     // zeta only, no sensing leakage
  OptimizationResult sensing;  // nu only
  double T = 0;
};

/// Orthogonal design. Rates are scaled by the harness: comm by (1 - T), sensing by T.
SopcResult sopc(const PowerControlInputs& in, const QosProblemSpec& spec);

}  // namespace cfisac

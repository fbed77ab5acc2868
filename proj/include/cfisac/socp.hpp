#pragma once

#include "cfisac/common.hpp"

#include <optional>
#include <string>
#include <vector>

namespace cfisac::socp {

/// ||A x + b|| <= c^T x + d
struct SocConstraint {
  RMatrix A;
  RVector b;
  RVector c;
  double d = 0;
  bool relaxable = true;  // receives the shared slack in solve_feasibility
};

/// g^T x <= h
struct LinearInequality {
  RVector g;
  double h = 0;
  bool relaxable = true;
};

/// minimize objective^T x subject to the cone, linear and sign constraints.
struct Problem {
  int n_vars = 0;
  RVector objective;  // empty or zero for pure feasibility
  std::vector<SocConstraint> cones;
  std::vector<LinearInequality> linear;
  std::vector<bool> nonneg;  // empty means no sign constraints

  explicit Problem(int n = 0) : n_vars(n), objective(RVector::Zero(n)) {}

  /// Throws DomainError on inconsistent dimensions or non-finite data.
  void validate() const;

  /// Largest violation of any constraint at x (<= 0 when strictly feasible).
  double max_violation(const RVector& x) const;
};

enum class Status { Optimal, Infeasible, MaxIterations };

std::string to_string(Status s);

struct Tolerances {
  double feas_tol = 1e-7;  // constraint violation accepted for a returned point
  double ipm_tol = 1e-9;   // interior-point residual and gap tolerance
  int max_iterations = 100;
  /// Lower bound -slack_floor on the shared slack of solve_feasibility; keeps the
  /// slack problem bounded when the relaxed set is unbounded. nullopt disables it.
  std::optional<double> slack_floor = 1.0;
};

struct Solution {
  Status status = Status::MaxIterations;
  RVector x;
  double objective_value = 0;
  double max_violation = 0;
  double slack = 0;          // optimal shared slack (solve_feasibility only)
  int iterations = 0;
  double kkt_residual = 0;   // max of primal, dual and complementarity residuals
  RVector dual_linear;       // multipliers of linear rows, then nonneg rows
  std::vector<RVector> dual_cones;
};

Solution solve(const Problem& problem, const Tolerances& tol = {});

/// Minimises a single slack s shared by every relaxable constraint:
/// ||A x + b|| <= c^T x + d + s,  g^T x <= h + s. Status is Optimal when the
/// minimal slack is at most feas_tol, Infeasible otherwise.
Solution solve_feasibility(const Problem& problem, const Tolerances& tol = {});

/// Plain-text dump of a problem for external cross-checking.
std::string dump(const Problem& problem);

}  // namespace cfisac::socp

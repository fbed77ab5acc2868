#include "cfisac/socp.hpp"

#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

namespace cfisac::socp {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Standard form: minimize c^T x  s.t.  G x + s = h,  s in K, where K is the
// product of the nonnegative orthant (general linear rows, then sign rows)
// and second-order cones.
struct ConeBlock {
  RMatrix G;  // m_b x n, first row is the cone "t" row
  RVector h;
  RMatrix gram_tail;  // G1^T G1 of the trailing rows, constant over iterations
  int offset = 0;
  int dim() const { return static_cast<int>(h.size()); }
};

struct ConeProgram {
  int n = 0;
  RVector c;
  RMatrix G_lin;  // general linear rows
  RVector h_lin;
  std::vector<int> sign_vars;  // rows -x_j + s = 0
  std::vector<ConeBlock> cones;
  int n_lp = 0;
  int m = 0;

  int n_lin() const { return static_cast<int>(h_lin.size()); }
  int degree() const { return n_lp + static_cast<int>(cones.size()); }
};

ConeProgram standardize(const Problem& p) {
  ConeProgram cp;
  cp.n = p.n_vars;
  cp.c = p.objective.size() == p.n_vars ? p.objective : RVector::Zero(p.n_vars);

  std::vector<std::pair<RVector, double>> lin;
  for (const auto& li : p.linear) lin.emplace_back(li.g, li.h);
  for (const auto& sc : p.cones) {
    if (sc.A.rows() == 0) lin.emplace_back(-sc.c, sc.d);  // 0 <= c^T x + d
  }
  cp.G_lin.resize(static_cast<Eigen::Index>(lin.size()), cp.n);
  cp.h_lin.resize(static_cast<Eigen::Index>(lin.size()));
  for (std::size_t r = 0; r < lin.size(); ++r) {
    cp.G_lin.row(r) = lin[r].first.transpose();
    cp.h_lin(r) = lin[r].second;
  }
  for (int j = 0; j < static_cast<int>(p.nonneg.size()); ++j)
    if (p.nonneg[j]) cp.sign_vars.push_back(j);
  cp.n_lp = cp.n_lin() + static_cast<int>(cp.sign_vars.size());

  int offset = cp.n_lp;
  for (const auto& sc : p.cones) {
    if (sc.A.rows() == 0) continue;
    ConeBlock blk;
    const int mb = static_cast<int>(sc.A.rows()) + 1;
    blk.G.resize(mb, cp.n);
    blk.G.row(0) = -sc.c.transpose();
    blk.G.bottomRows(mb - 1) = -sc.A;
    blk.h.resize(mb);
    blk.h(0) = sc.d;
    blk.h.tail(mb - 1) = sc.b;
    Eigen::SparseMatrix<double> tail = blk.G.bottomRows(mb - 1).sparseView();
    blk.gram_tail = RMatrix(tail.transpose() * tail);
    blk.offset = offset;
    offset += mb;
    cp.cones.push_back(std::move(blk));
  }
  cp.m = offset;
  return cp;
}

RVector apply_G(const ConeProgram& cp, const RVector& x) {
  RVector out(cp.m);
  if (cp.n_lin() > 0) out.head(cp.n_lin()) = cp.G_lin * x;
  for (std::size_t r = 0; r < cp.sign_vars.size(); ++r) out(cp.n_lin() + r) = -x(cp.sign_vars[r]);
  for (const auto& blk : cp.cones) out.segment(blk.offset, blk.dim()) = blk.G * x;
  return out;
}

RVector apply_GT(const ConeProgram& cp, const RVector& z) {
  RVector out = RVector::Zero(cp.n);
  if (cp.n_lin() > 0) out += cp.G_lin.transpose() * z.head(cp.n_lin());
  for (std::size_t r = 0; r < cp.sign_vars.size(); ++r) out(cp.sign_vars[r]) -= z(cp.n_lin() + r);
  for (const auto& blk : cp.cones) out += blk.G.transpose() * z.segment(blk.offset, blk.dim());
  return out;
}

RVector h_vector(const ConeProgram& cp) {
  RVector h = RVector::Zero(cp.m);
  if (cp.n_lin() > 0) h.head(cp.n_lin()) = cp.h_lin;
  for (const auto& blk : cp.cones) h.segment(blk.offset, blk.dim()) = blk.h;
  return h;
}

double jnorm_sq(const Eigen::Ref<const RVector>& u) { return u(0) * u(0) - u.tail(u.size() - 1).squaredNorm(); }

// Nesterov-Todd scaling W (symmetric): W z = W^{-1} s = lambda.
struct Scaling {
  RVector lp_w;                 // diagonal for LP rows
  std::vector<double> eta;      // per cone
  std::vector<RVector> wbar;    // per cone, J(wbar) = 1
  RVector lambda;
};

// H(w) v with H(w) = [w0, w1^T; w1, I + w1 w1^T / (1 + w0)]
RVector hyperbolic_apply(const RVector& w, const Eigen::Ref<const RVector>& v, double sign) {
  const int n = static_cast<int>(w.size());
  RVector out(n);
  const double w0 = w(0);
  const auto w1 = w.tail(n - 1);
  const auto v1 = v.tail(n - 1);
  const double w1v1 = w1.dot(v1);
  out(0) = w0 * v(0) + sign * w1v1;
  out.tail(n - 1) = v1 + (sign * v(0) + w1v1 / (1.0 + w0)) * w1;
  return out;
}

RVector apply_W(const ConeProgram& cp, const Scaling& W, const RVector& v, bool inverse) {
  RVector out(cp.m);
  for (int i = 0; i < cp.n_lp; ++i) out(i) = inverse ? v(i) / W.lp_w(i) : v(i) * W.lp_w(i);
  for (std::size_t b = 0; b < cp.cones.size(); ++b) {
    const auto& blk = cp.cones[b];
    const double scale = inverse ? 1.0 / W.eta[b] : W.eta[b];
    out.segment(blk.offset, blk.dim()) =
        scale * hyperbolic_apply(W.wbar[b], v.segment(blk.offset, blk.dim()), inverse ? -1.0 : 1.0);
  }
  return out;
}

Scaling compute_scaling(const ConeProgram& cp, const RVector& s, const RVector& z) {
  Scaling W;
  W.lp_w.resize(cp.n_lp);
  W.lambda.resize(cp.m);
  for (int i = 0; i < cp.n_lp; ++i) {
    W.lp_w(i) = std::sqrt(s(i) / z(i));
    W.lambda(i) = std::sqrt(s(i) * z(i));
  }
  for (const auto& blk : cp.cones) {
    const auto sb = s.segment(blk.offset, blk.dim());
    const auto zb = z.segment(blk.offset, blk.dim());
    const double sres = std::sqrt(jnorm_sq(sb));
    const double zres = std::sqrt(jnorm_sq(zb));
    const RVector sn = sb / sres;
    const RVector zn = zb / zres;
    const double gamma = std::sqrt(0.5 * (1.0 + sn.dot(zn)));
    RVector w(blk.dim());
    w(0) = (sn(0) + zn(0)) / (2.0 * gamma);
    w.tail(blk.dim() - 1) = (sn.tail(blk.dim() - 1) - zn.tail(blk.dim() - 1)) / (2.0 * gamma);
    const double eta = std::sqrt(sres / zres);
    W.lambda.segment(blk.offset, blk.dim()) = eta * hyperbolic_apply(w, zb, 1.0);
    W.eta.push_back(eta);
    W.wbar.push_back(std::move(w));
  }
  return W;
}

// Jordan product u o v.
RVector circ(const ConeProgram& cp, const RVector& u, const RVector& v) {
  RVector out(cp.m);
  out.head(cp.n_lp) = u.head(cp.n_lp).cwiseProduct(v.head(cp.n_lp));
  for (const auto& blk : cp.cones) {
    const int o = blk.offset, d = blk.dim();
    out(o) = u.segment(o, d).dot(v.segment(o, d));
    out.segment(o + 1, d - 1) = u(o) * v.segment(o + 1, d - 1) + v(o) * u.segment(o + 1, d - 1);
  }
  return out;
}

// Solves lambda o x = v.
RVector cone_divide(const ConeProgram& cp, const RVector& lambda, const RVector& v) {
  RVector out(cp.m);
  out.head(cp.n_lp) = v.head(cp.n_lp).cwiseQuotient(lambda.head(cp.n_lp));
  for (const auto& blk : cp.cones) {
    const int o = blk.offset, d = blk.dim();
    const double l0 = lambda(o);
    const auto l1 = lambda.segment(o + 1, d - 1);
    const double x0 = (l0 * v(o) - l1.dot(v.segment(o + 1, d - 1))) / jnorm_sq(lambda.segment(o, d));
    out(o) = x0;
    out.segment(o + 1, d - 1) = (v.segment(o + 1, d - 1) - x0 * l1) / l0;
  }
  return out;
}

RVector identity_element(const ConeProgram& cp) {
  RVector e = RVector::Zero(cp.m);
  e.head(cp.n_lp).setOnes();
  for (const auto& blk : cp.cones) e(blk.offset) = 1.0;
  return e;
}

// Smallest t with u + t e in the cone, i.e. the largest cone "violation".
double max_violation_of(const ConeProgram& cp, const RVector& u) {
  double v = -kInf;
  for (int i = 0; i < cp.n_lp; ++i) v = std::max(v, -u(i));
  for (const auto& blk : cp.cones)
    v = std::max(v, u.segment(blk.offset + 1, blk.dim() - 1).norm() - u(blk.offset));
  return v;
}

// Largest t in [0, inf) keeping u + t d inside the cone (u strictly interior).
double max_step(const ConeProgram& cp, const RVector& u, const RVector& d) {
  double t = kInf;
  for (int i = 0; i < cp.n_lp; ++i)
    if (d(i) < 0) t = std::min(t, -u(i) / d(i));
  for (const auto& blk : cp.cones) {
    const int o = blk.offset, k = blk.dim();
    const auto u1 = u.segment(o + 1, k - 1);
    const auto d1 = d.segment(o + 1, k - 1);
    const double a = d(o) * d(o) - d1.squaredNorm();
    const double b = u(o) * d(o) - u1.dot(d1);
    const double c = std::max(u(o) * u(o) - u1.squaredNorm(), 0.0);
    double root = kInf;
    if (std::abs(a) < 1e-300) {
      if (b < 0) root = -c / (2.0 * b);
    } else {
      const double disc = b * b - a * c;
      if (disc >= 0) {
        const double sq = std::sqrt(disc);
        const double q = -(b + (b >= 0 ? sq : -sq));
        for (double r : {q / a, q != 0 ? c / q : kInf})
          if (r > 0) root = std::min(root, r);
      }
    }
    // A line leaving through the apex region is caught by the sign of u0 + t d0.
    if (d(o) < 0) root = std::min(root, u(o) / -d(o));
    t = std::min(t, root);
  }
  return t;
}

// G^T W^{-2} G assembled block by block.
RMatrix reduced_kkt(const ConeProgram& cp, const Scaling& W) {
  RMatrix H = RMatrix::Zero(cp.n, cp.n);
  if (cp.n_lin() > 0) {
    const RVector d = W.lp_w.head(cp.n_lin()).array().inverse().square();
    H.noalias() += cp.G_lin.transpose() * d.asDiagonal() * cp.G_lin;
  }
  for (std::size_t r = 0; r < cp.sign_vars.size(); ++r) {
    const double w = W.lp_w(cp.n_lin() + r);
    H(cp.sign_vars[r], cp.sign_vars[r]) += 1.0 / (w * w);
  }
  for (std::size_t b = 0; b < cp.cones.size(); ++b) {
    const auto& blk = cp.cones[b];
    const RVector& w = W.wbar[b];
    const int d = blk.dim();
    const double w0 = w(0);
    const RVector g0 = blk.G.row(0).transpose();
    const RVector p = blk.G.bottomRows(d - 1).transpose() * w.tail(d - 1);
    const RVector t = w0 * g0 - p;
    const RVector r = p / (1.0 + w0) - g0;
    const double inv_eta_sq = 1.0 / (W.eta[b] * W.eta[b]);
    H.noalias() += inv_eta_sq * (t * t.transpose() + blk.gram_tail + p * r.transpose() + r * p.transpose() +
                                 w.tail(d - 1).squaredNorm() * r * r.transpose());
  }
  return H;
}

struct KktSolver {
  Eigen::LDLT<RMatrix> ldlt;
  bool ok = false;

  void factor(RMatrix H) {
    const double reg = 1e-13 * std::max(1.0, H.diagonal().maxCoeff());
    H.diagonal().array() += reg;
    ldlt.compute(H);
    ok = ldlt.info() == Eigen::Success;
  }
};

struct Direction {
  RVector dx, ds, dz, ds_scaled, dz_scaled;
};

// Solves  G^T dz = bx,  G dx + ds = bz,  lambda o (W^{-1} ds + W dz) = bs.
Direction newton_direction(const ConeProgram& cp, const Scaling& W, const KktSolver& kkt, const RVector& bx,
                           const RVector& bz, const RVector& bs) {
  Direction d;
  const RVector q = cone_divide(cp, W.lambda, bs);
  const RVector r2 = bz - apply_W(cp, W, q, false);
  const RVector winv_r2 = apply_W(cp, W, r2, true);
  const RVector rhs = bx + apply_GT(cp, apply_W(cp, W, winv_r2, true));
  d.dx = kkt.ldlt.solve(rhs);
  d.dz_scaled = apply_W(cp, W, apply_G(cp, d.dx) - r2, true);
  d.ds_scaled = q - d.dz_scaled;
  d.ds = apply_W(cp, W, d.ds_scaled, false);
  d.dz = apply_W(cp, W, d.dz_scaled, true);
  return d;
}

Direction refined_direction(const ConeProgram& cp, const Scaling& W, const KktSolver& kkt, const RVector& bx,
                            const RVector& bz, const RVector& bs) {
  Direction d = newton_direction(cp, W, kkt, bx, bz, bs);
  for (int pass = 0; pass < 3; ++pass) {
    const RVector ex = bx - apply_GT(cp, d.dz);
    const RVector ez = bz - apply_G(cp, d.dx) - d.ds;
    const RVector es = bs - circ(cp, W.lambda, d.ds_scaled + d.dz_scaled);
    const double err = std::max({ex.lpNorm<Eigen::Infinity>(), ez.lpNorm<Eigen::Infinity>(),
                                 es.lpNorm<Eigen::Infinity>()});
    const double ref = std::max({1.0, bx.lpNorm<Eigen::Infinity>(), bz.lpNorm<Eigen::Infinity>(),
                                 bs.lpNorm<Eigen::Infinity>()});
    if (!(err > 1e-12 * ref)) break;
    const Direction c = newton_direction(cp, W, kkt, ex, ez, es);
    d.dx += c.dx;
    d.ds += c.ds;
    d.dz += c.dz;
    d.ds_scaled += c.ds_scaled;
    d.dz_scaled += c.dz_scaled;
  }
  return d;
}

struct IpmResult {
  bool converged = false;
  RVector x, s, z;
  int iterations = 0;
  double pres = 0, dres = 0, gap = 0;
};

constexpr double kNearTol = 1e-7;
constexpr int kStallIters = 5;

IpmResult interior_point(const ConeProgram& cp, const Tolerances& tol) {
  IpmResult res;
  const RVector h = h_vector(cp);
  const RVector e = identity_element(cp);
  const double h_scale = std::max(1.0, h.norm());
  const double c_scale = std::max(1.0, cp.c.norm());

  // Initial point: least-squares primal and least-norm dual, shifted into the cone.
  Scaling unit;
  unit.lp_w = RVector::Ones(cp.n_lp);
  for (const auto& blk : cp.cones) {
    RVector w = RVector::Zero(blk.dim());
    w(0) = 1.0;
    unit.eta.push_back(1.0);
    unit.wbar.push_back(std::move(w));
  }
  KktSolver kkt;
  kkt.factor(reduced_kkt(cp, unit));
  if (!kkt.ok) return res;
  RVector x = kkt.ldlt.solve(apply_GT(cp, h));
  RVector s = h - apply_G(cp, x);
  RVector z = apply_G(cp, kkt.ldlt.solve(-cp.c));
  const double as = max_violation_of(cp, s);
  if (as >= -1e-8 * h_scale) s += (1.0 + std::max(as, 0.0)) * e;
  const double az = max_violation_of(cp, z);
  if (az >= -1e-8 * c_scale) z += (1.0 + std::max(az, 0.0)) * e;

  const double degree = std::max(1, cp.degree());
  struct Best {
    double merit = std::numeric_limits<double>::infinity();
    RVector x, s, z;
    double pres = 0, dres = 0, gap = 0;
    int iteration = 0;
  } best;
  for (int it = 0; it <= tol.max_iterations; ++it) {
    const RVector rx = apply_GT(cp, z) + cp.c;
    const RVector rz = apply_G(cp, x) + s - h;
    const double gap = s.dot(z);
    res.pres = rz.norm() / h_scale;
    res.dres = rx.norm() / c_scale;
    res.gap = gap;
    res.iterations = it;
    const double pcost = cp.c.dot(x);
    if (!std::isfinite(res.pres) || !std::isfinite(res.dres) || !std::isfinite(gap)) break;
    const double rel_gap = std::abs(gap) / std::max(1.0, std::abs(pcost));
    if (res.pres <= tol.ipm_tol && res.dres <= tol.ipm_tol && rel_gap <= tol.ipm_tol) {
      res.converged = true;
      best = {};
      break;
    }
    const double merit = std::max({res.pres, res.dres, rel_gap});
    if (merit < best.merit) {
      best = {merit, x, s, z, res.pres, res.dres, gap, it};
    } else if (best.merit <= kNearTol && it - best.iteration >= kStallIters) {
      break;
    }
    if (it == tol.max_iterations) break;
    if (x.lpNorm<Eigen::Infinity>() > 1e14 || z.lpNorm<Eigen::Infinity>() > 1e14) break;

    const Scaling W = compute_scaling(cp, s, z);
    kkt.factor(reduced_kkt(cp, W));
    if (!kkt.ok) break;
    const double mu = gap / degree;

    // Predictor.
    const RVector lam_sq = circ(cp, W.lambda, W.lambda);
    const Direction aff = refined_direction(cp, W, kkt, -rx, -rz, -lam_sq);
    const double a_aff = std::min({1.0, max_step(cp, s, aff.ds), max_step(cp, z, aff.dz)});
    const double sigma = std::pow(std::clamp(1.0 - a_aff, 0.0, 1.0), 3);

    // Corrector.
    const RVector bs = -lam_sq - circ(cp, aff.ds_scaled, aff.dz_scaled) + sigma * mu * e;
    const Direction d = refined_direction(cp, W, kkt, -rx, -rz, bs);
    const double a_max = std::min(max_step(cp, s, d.ds), max_step(cp, z, d.dz));
    const double alpha = std::min(1.0, 0.99 * a_max);
    if (!(alpha > 1e-14)) break;
    x += alpha * d.dx;
    s += alpha * d.ds;
    z += alpha * d.dz;
  }
  if (!res.converged && best.merit <= kNearTol) {
    // Accuracy limited by conditioning: return the best iterate seen.
    res.converged = true;
    res.pres = best.pres;
    res.dres = best.dres;
    res.gap = best.gap;
    x = std::move(best.x);
    s = std::move(best.s);
    z = std::move(best.z);
  }
  res.x = std::move(x);
  res.s = std::move(s);
  res.z = std::move(z);
  return res;
}

Solution finish(const Problem& p, const ConeProgram& cp, const IpmResult& r) {
  Solution sol;
  sol.x = r.x;
  sol.iterations = r.iterations;
  sol.objective_value = p.objective.size() == p.n_vars ? p.objective.dot(r.x) : 0.0;
  sol.max_violation = p.max_violation(r.x);
  sol.kkt_residual = std::max({r.pres, r.dres, std::abs(r.gap) / std::max(1.0, std::abs(sol.objective_value))});
  sol.dual_linear = r.z.head(cp.n_lp);
  for (const auto& blk : cp.cones) sol.dual_cones.push_back(r.z.segment(blk.offset, blk.dim()));
  return sol;
}

Problem slack_problem(const Problem& p, const Tolerances& tol) {
  const int n = p.n_vars;
  Problem aug(n + 1);
  aug.objective(n) = 1.0;
  bool any_relaxed = false;
  for (const auto& sc : p.cones) {
    SocConstraint c = sc;
    c.c.conservativeResize(n + 1);
    c.c(n) = sc.relaxable ? 1.0 : 0.0;
    c.A.conservativeResize(Eigen::NoChange, n + 1);
    c.A.col(n).setZero();
    any_relaxed |= sc.relaxable;
    aug.cones.push_back(std::move(c));
  }
  for (const auto& li : p.linear) {
    LinearInequality l = li;
    l.g.conservativeResize(n + 1);
    l.g(n) = li.relaxable ? -1.0 : 0.0;
    any_relaxed |= li.relaxable;
    aug.linear.push_back(std::move(l));
  }
  if (!p.nonneg.empty()) {
    aug.nonneg = p.nonneg;
    aug.nonneg.push_back(false);
  }
  const double floor = tol.slack_floor ? *tol.slack_floor : (any_relaxed ? kInf : 0.0);
  if (std::isfinite(floor)) {
    LinearInequality lb;
    lb.g = RVector::Zero(n + 1);
    lb.g(n) = -1.0;
    lb.h = floor;
    lb.relaxable = false;
    aug.linear.push_back(std::move(lb));
  }
  return aug;
}

}  // namespace

void Problem::validate() const {
  if (n_vars < 1) throw DomainError("SOCP needs at least one variable");
  if (objective.size() != 0 && objective.size() != n_vars) throw DomainError("objective has the wrong length");
  if (!objective.allFinite()) throw DomainError("objective has non-finite entries");
  for (const auto& c : cones) {
    if (c.A.cols() != n_vars || c.c.size() != n_vars || c.b.size() != c.A.rows())
      throw DomainError("second-order cone constraint has inconsistent dimensions");
    if (!c.A.allFinite() || !c.b.allFinite() || !c.c.allFinite() || !std::isfinite(c.d))
      throw DomainError("second-order cone constraint has non-finite entries");
  }
  for (const auto& l : linear) {
    if (l.g.size() != n_vars) throw DomainError("linear inequality has the wrong length");
    if (!l.g.allFinite() || !std::isfinite(l.h)) throw DomainError("linear inequality has non-finite entries");
  }
  if (!nonneg.empty() && static_cast<int>(nonneg.size()) != n_vars)
    throw DomainError("nonnegativity mask has the wrong length");
}

double Problem::max_violation(const RVector& x) const {
  double v = -kInf;
  for (const auto& c : cones) v = std::max(v, (c.A * x + c.b).norm() - c.c.dot(x) - c.d);
  for (const auto& l : linear) v = std::max(v, l.g.dot(x) - l.h);
  for (std::size_t j = 0; j < nonneg.size(); ++j)
    if (nonneg[j]) v = std::max(v, -x(j));
  return std::isfinite(v) ? v : (v < 0 ? -kInf : kInf);
}

std::string to_string(Status s) {
  switch (s) {
    case Status::Optimal:
      return "optimal";
    case Status::Infeasible:
      return "infeasible";
    case Status::MaxIterations:
      return "max_iterations";
  }
  return "unknown";
}

Solution solve_feasibility(const Problem& p, const Tolerances& tol) {
  p.validate();
  const Problem aug = slack_problem(p, tol);
  const ConeProgram cp = standardize(aug);
  const IpmResult r = interior_point(cp, tol);
  Solution sol = finish(aug, cp, r);
  sol.slack = r.x.size() > p.n_vars ? r.x(p.n_vars) : kInf;
  sol.x = r.x.head(p.n_vars);
  sol.max_violation = p.max_violation(sol.x);
  sol.objective_value = p.objective.size() == p.n_vars ? p.objective.dot(sol.x) : 0.0;
  if (!r.converged)
    sol.status = Status::MaxIterations;
  else
    sol.status = sol.slack <= tol.feas_tol ? Status::Optimal : Status::Infeasible;
  return sol;
}

Solution solve(const Problem& p, const Tolerances& tol) {
  p.validate();
  const ConeProgram cp = standardize(p);
  const IpmResult r = interior_point(cp, tol);
  Solution sol = finish(p, cp, r);
  if (r.converged && sol.max_violation <= tol.feas_tol) {
    sol.status = Status::Optimal;
    return sol;
  }
  Solution feas = solve_feasibility(p, tol);
  if (feas.status == Status::Infeasible) {
    feas.objective_value = p.objective.size() == p.n_vars ? p.objective.dot(feas.x) : 0.0;
    return feas;
  }
  sol.status = Status::MaxIterations;
  return sol;
}

std::string dump(const Problem& p) {
  std::ostringstream os;
  os.precision(17);
  const Eigen::IOFormat fmt(Eigen::FullPrecision, Eigen::DontAlignCols, " ", "\n");
  os << "n_vars " << p.n_vars << "\n";
  const RVector obj = p.objective.size() ? p.objective : RVector::Zero(p.n_vars);
  os << "objective\n" << obj.transpose().format(fmt) << "\n";
  for (std::size_t i = 0; i < p.cones.size(); ++i) {
    const auto& c = p.cones[i];
    os << "soc " << i << " rows " << c.A.rows() << " relaxable " << c.relaxable << "\n";
    os << "A\n" << c.A.format(fmt) << "\nb\n" << c.b.transpose().format(fmt) << "\nc\n"
       << c.c.transpose().format(fmt) << "\nd " << c.d << "\n";
  }
  for (std::size_t i = 0; i < p.linear.size(); ++i)
    os << "lin " << i << " relaxable " << p.linear[i].relaxable << "\ng\n"
       << p.linear[i].g.transpose().format(fmt) << "\nh " << p.linear[i].h << "\n";
  os << "nonneg";
  for (bool b : p.nonneg) os << ' ' << b;
  os << "\n";
  return os.str();
}

}  // namespace cfisac::socp

#include "icbpg/subsolver.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace icbpg {

namespace k = kernels;

double lifted_curvature(const k::ColumnRange& a) {
  const double lam = power_iteration_gram(a, 30);
  return 2.0 * 1.05 * std::max(lam, std::numeric_limits<double>::min());
}

LassoSubproblem::LassoSubproblem(k::ColumnRange a, Vector b_tilde, double lambda,
                                 std::optional<double> curvature,
                                 std::shared_ptr<const SparseMatrix> owner)
    : a_(a), owner_(std::move(owner)), b_tilde_(std::move(b_tilde)), lambda_(lambda) {
  if (a_.matrix == nullptr) throw std::invalid_argument("subproblem without matrix");
  if (!(lambda_ >= 0.0)) throw std::invalid_argument("subproblem lambda must be non-negative");
  require_size(b_tilde_.size(), a_.rows(), "subproblem right-hand side");
  atb_.resize(a_.cols());
  k::serial::gather(a_, k::view(b_tilde_), k::view(atb_));
  curvature_ = curvature ? *curvature : lifted_curvature(a_);
  if (!(curvature_ > 0.0)) throw std::invalid_argument("subproblem curvature must be positive");
}

LassoSubproblem LassoSubproblem::from_prox_query(const ProxQuery& query) {
  query.validate();
  const L1Norm& psi = query.l1();
  const Matrix r = query.metric->upper_factor();
  auto owner = std::make_shared<const SparseMatrix>(r.sparseView());
  const Vector rx = r * query.x;
  const Vector rtg = r.transpose().triangularView<Eigen::Lower>().solve(query.g);
  Vector b_tilde = rx - rtg;
  const double offset = 0.5 * rx.squaredNorm() - 0.5 * b_tilde.squaredNorm();
  const k::ColumnRange cols{owner.get(), 0, owner->cols()};
  LassoSubproblem sub(cols, std::move(b_tilde), psi.weight(), std::nullopt, owner);
  sub.offset_ = offset;
  return sub;
}

Vector LassoSubproblem::residual(const Vector& y) const {
  require_size(y.size(), dimension(), "subproblem point");
  Vector r = -b_tilde_;
  k::serial::scatter_add(a_, k::view(y), k::view(r));
  return r;
}

Vector LassoSubproblem::correlation(const Vector& r) const {
  Vector out(dimension());
  k::serial::gather(a_, k::view(r), k::view(out));
  return out;
}

double LassoSubproblem::smooth_value(const Vector& y) const { return 0.5 * residual(y).squaredNorm(); }

double LassoSubproblem::primal(const Vector& y) const {
  return smooth_value(y) + lambda_ * y.lpNorm<1>();
}

LassoSubproblem build_subproblem(const CompositeProblem& problem, const Vector& x, const Vector& r,
                                 Index i, const SubproblemOptions& options) {
  problem.partition().check_block(i);
  require_size(x.size(), problem.dimension(), "state");
  require_size(r.size(), problem.smooth().rows(), "residual");
  if (options.check_residual) {
    const Vector fresh = problem.smooth().residual(x);
    const double err = (fresh - r).lpNorm<Eigen::Infinity>();
    if (err > options.residual_tolerance * (1.0 + fresh.lpNorm<Eigen::Infinity>())) {
      throw std::runtime_error("stale residual: max deviation " + std::to_string(err));
    }
  }
  const k::ColumnRange cols = problem.block_columns(i);
  Vector b_tilde = -r;
  const Vector xi = problem.partition().segment(x, i);
  k::serial::scatter_add(cols, k::view(xi), k::view(b_tilde));
  return LassoSubproblem(cols, std::move(b_tilde), problem.lambda(i), options.curvature);
}

double prox_equivalence_constant(const LassoSubproblem& sub, const ProxQuery& query) {
  query.validate();
  const auto cols = query.metric->gram_columns();
  const auto& own = sub.columns();
  if (!cols || cols->matrix != own.matrix || cols->begin != own.begin || cols->end != own.end) {
    throw std::invalid_argument("prox query metric is not the Gram metric of the subproblem block");
  }
  // phi(y) - P(y) = <g - B x + A^T b~, y> + 0.5 x^T B x - 0.5 ||b~||^2; the
  // linear part vanishes exactly when g = A^T (A x - b~).
  const Vector ax_r = sub.residual(query.x);
  const Vector grad = sub.correlation(ax_r);
  if ((grad - query.g).norm() > 1e-8 * (1.0 + grad.norm())) {
    throw std::invalid_argument("prox query linear term is not the block gradient");
  }
  const Vector ax = ax_r + sub.b_tilde();
  return 0.5 * ax.squaredNorm() - 0.5 * sub.b_tilde().squaredNorm();
}

namespace {

GapParts gap_from(const LassoSubproblem& sub, const Vector& y, const Vector& r, const Vector& corr) {
  const double lambda = sub.lambda();
  const double norm_inf = corr.size() > 0 ? corr.lpNorm<Eigen::Infinity>() : 0.0;
  const double s = norm_inf > lambda ? lambda / norm_inf : 1.0;
  const double rr = r.squaredNorm();
  GapParts g;
  g.primal = 0.5 * rr + lambda * y.lpNorm<1>();
  g.dual = -0.5 * s * s * rr - s * r.dot(sub.b_tilde());
  g.gap = std::max(0.0, g.primal - g.dual);
  return g;
}

}  // namespace

GapParts duality_gap_parts(const LassoSubproblem& sub, const Vector& y) {
  const Vector r = sub.residual(y);
  return gap_from(sub, y, r, sub.correlation(r));
}

double duality_gap(const LassoSubproblem& sub, const Vector& y) { return duality_gap_parts(sub, y).gap; }

DecreaseGuard DecreaseGuard::monotone(double f_reference) {
  DecreaseGuard g;
  g.accept = [f_reference](const Vector&, double f) { return f <= f_reference; };
  g.f_reference = f_reference;
  return g;
}

SubsolverResult box_gp_solve(const LassoSubproblem& sub, const Vector& y0, double delta,
                             const DecreaseGuard& guard, const SubsolverOptions& options) {
  if (!(delta >= 0.0)) throw std::invalid_argument("subsolver tolerance must be non-negative");
  require_size(y0.size(), sub.dimension(), "warm start");
  const auto wall_start = std::chrono::steady_clock::now();
  const double lambda = sub.lambda();
  const k::ColumnRange& a = sub.columns();

  Vector y = y0;
  Vector r = sub.residual(y);
  Vector corr = sub.correlation(r);
  GapParts gp = gap_from(sub, y, r, corr);
  const double tol = delta > 0.0 ? delta : 1e-12 * (1.0 + std::abs(gp.primal));
  const double floor = 1e-14 * (1.0 + std::abs(gp.primal));
  double curvature = sub.curvature();

  SubsolverResult res;
  std::optional<Vector> best;  // gap-feasible iterate with the lowest smooth value
  double best_f = std::numeric_limits<double>::infinity();
  double best_gap = 0.0;
  double best_p = 0.0;

  Vector zp(y.size()), zm(y.size()), step(y.size());
  long it = 0;
  bool cap_hit = true;
  for (;; ++it) {
    const double f = 0.5 * r.squaredNorm();
    if (options.record_trace) res.primal_trace.push_back(gp.primal);
    if (gp.gap <= tol) {
      if (guard.passes(y, f)) {
        best = y;
        best_f = f;
        best_gap = gp.gap;
        best_p = gp.primal;
        cap_hit = false;
        break;
      }
      if (f < best_f) {
        best = y;
        best_f = f;
        best_gap = gp.gap;
        best_p = gp.primal;
      }
      // Every later iterate z has P(z) <= P(y), so ||z - y||_B <= 2 sqrt(2 gap) and
      // f(z) >= f(y) - ||r|| * 2 sqrt(2 gap).
      if (guard.f_reference) {
        const double reach = 2.0 * r.norm() * std::sqrt(2.0 * gp.gap);
        if (f - reach > *guard.f_reference) {
          res.guard_unattainable = true;
          cap_hit = false;
          break;
        }
      }
      if (gp.gap <= floor) {
        res.guard_unattainable = true;
        cap_hit = false;
        break;
      }
    }
    if (it >= options.max_inner) break;

    // One projected-gradient step on the lifted pair (max(y,0), max(-y,0)).
    for (;;) {
      const double t = 1.0 / curvature;
      for (Index j = 0; j < y.size(); ++j) {
        zp[j] = std::max(0.0, std::max(y[j], 0.0) - t * (corr[j] + lambda));
        zm[j] = std::max(0.0, std::max(-y[j], 0.0) - t * (lambda - corr[j]));
        step[j] = (zp[j] - zm[j]) - y[j];
      }
      Vector r_new = r;
      k::serial::scatter_add(a, k::view(step), k::view(r_new));
      const Vector y_new = y + step;
      const double p_new = 0.5 * r_new.squaredNorm() + lambda * y_new.lpNorm<1>();
      if (p_new <= gp.primal + 1e-13 * (1.0 + std::abs(gp.primal))) {
        y = y_new;
        r = std::move(r_new);
        break;
      }
      curvature *= 2.0;
      ++res.curvature_increases;
    }
    if (options.residual_refresh > 0 && (it + 1) % options.residual_refresh == 0) r = sub.residual(y);
    k::serial::gather(a, k::view(r), k::view(corr));
    gp = gap_from(sub, y, r, corr);
  }

  res.inner_iterations = it;
  if (best) {
    // Either the guard passed, or the lowest-f gap-feasible iterate is returned flagged.
    const bool passed = !cap_hit && !res.guard_unattainable;
    res.y = std::move(*best);
    res.duality_gap = best_gap;
    res.primal = best_p;
    res.smooth_value = best_f;
    res.converged = true;
    res.f_decrease_satisfied = passed;
  } else {
    res.y = y;
    res.duality_gap = gp.gap;
    res.primal = gp.primal;
    res.smooth_value = 0.5 * r.squaredNorm();
    res.converged = false;
    res.f_decrease_satisfied = guard.passes(y, res.smooth_value);
  }
  res.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return res;
}

ProxReference reference_prox_minimum(const ProxQuery& query) {
  const LassoSubproblem sub = LassoSubproblem::from_prox_query(query);
  const double lambda = sub.lambda();
  SubsolverOptions opts;
  opts.max_inner = 2000000;
  const SubsolverResult res = box_gp_solve(sub, Vector::Zero(query.dimension()), 0.0,
                                           DecreaseGuard::none(), opts);
  ProxReference ref;
  ref.minimizer = res.y;
  ref.value = prox_objective(query, res.y);
  ref.duality_gap = res.duality_gap;

  // Solve the optimality system on the support with the signs held fixed.
  const Vector& y = res.y;
  std::vector<Index> support;
  for (Index j = 0; j < y.size(); ++j) {
    if (y[j] != 0.0) support.push_back(j);
  }
  if (support.empty() || query.dimension() > 2000) return ref;
  const Matrix b = query.metric->to_dense();
  const Vector rhs_full = b * query.x - query.g;
  const Index ns = static_cast<Index>(support.size());
  Matrix bss(ns, ns);
  Vector rhs(ns);
  for (Index a = 0; a < ns; ++a) {
    rhs[a] = rhs_full[support[a]] - lambda * (y[support[a]] > 0.0 ? 1.0 : -1.0);
    for (Index c = 0; c < ns; ++c) bss(a, c) = b(support[a], support[c]);
  }
  const Eigen::LLT<Matrix> llt(bss);
  if (llt.info() != Eigen::Success) return ref;
  const Vector zs = llt.solve(rhs);
  Vector cand = Vector::Zero(y.size());
  for (Index a = 0; a < ns; ++a) {
    if ((zs[a] > 0.0) != (y[support[a]] > 0.0) || zs[a] == 0.0) return ref;
    cand[support[a]] = zs[a];
  }
  const Vector corr = rhs_full - b * cand;
  for (Index j = 0; j < y.size(); ++j) {
    if (cand[j] == 0.0 && std::abs(corr[j]) > lambda * (1.0 + 1e-12) + 1e-14) return ref;
  }
  const double value = prox_objective(query, cand);
  if (value <= ref.value) {
    ref.minimizer = std::move(cand);
    ref.value = value;
  }
  return ref;
}

}  // namespace icbpg

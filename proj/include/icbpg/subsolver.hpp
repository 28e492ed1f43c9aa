#pragma once

// Block LASSO subproblem  P(y) = 0.5*||A_i y - b~||^2 + lambda*||y||_1  and its
// box-constrained gradient-projection solver with duality-gap stopping.

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "icbpg/kernels.hpp"
#include "icbpg/problem.hpp"
#include "icbpg/prox.hpp"

namespace icbpg {

/// Largest eigenvalue of the lifted Hessian [[B, -B], [-B, B]] (twice that of
/// B = A^T A), from 30 power iterations with a 5% margin.
double lifted_curvature(const kernels::ColumnRange& a);

class LassoSubproblem {
 public:
  /// `owner` keeps the matrix behind `a` alive when the subproblem owns it.
  LassoSubproblem(kernels::ColumnRange a, Vector b_tilde, double lambda,
                  std::optional<double> curvature = std::nullopt,
                  std::shared_ptr<const SparseMatrix> owner = nullptr);

  /// Rewrites a prox query with metric B = R^T R as
  ///   phi(z) = 0.5*||R z - (R x - R^{-T} g)||^2 + lambda*||z||_1 + offset().
  static LassoSubproblem from_prox_query(const ProxQuery& query);

  Index dimension() const { return a_.cols(); }
  Index rows() const { return a_.rows(); }
  const kernels::ColumnRange& columns() const { return a_; }
  const Vector& b_tilde() const { return b_tilde_; }
  double lambda() const { return lambda_; }
  /// A^T b~, cached.
  const Vector& atb() const { return atb_; }
  double curvature() const { return curvature_; }
  /// Additive constant relating the subproblem to its source prox query (0 otherwise).
  double offset() const { return offset_; }

  /// A y - b~.
  Vector residual(const Vector& y) const;
  /// A^T r.
  Vector correlation(const Vector& r) const;
  /// 0.5*||A y - b~||^2.
  double smooth_value(const Vector& y) const;
  double primal(const Vector& y) const;

 private:
  kernels::ColumnRange a_;
  std::shared_ptr<const SparseMatrix> owner_;
  Vector b_tilde_;
  double lambda_;
  Vector atb_;
  double curvature_;
  double offset_ = 0.0;
};

struct SubproblemOptions {
  /// Recompute A x - b and compare with the supplied residual.
  bool check_residual = false;
  double residual_tolerance = 1e-8;
  std::optional<double> curvature;
};

/// b~ = A_i x_i - r with r = A x - b maintained by the caller.
LassoSubproblem build_subproblem(const CompositeProblem& problem, const Vector& x, const Vector& r,
                                 Index i, const SubproblemOptions& options = {});

/// c with <g,y> + 0.5*||y - x_i||_B^2 + lambda*||y||_1 = P(y) + c for all y.
/// Requires B = A_i^T A_i built from the subproblem's columns.
double prox_equivalence_constant(const LassoSubproblem& sub, const ProxQuery& query);

struct GapParts {
  double gap = 0.0;
  double primal = 0.0;
  double dual = 0.0;
};

/// Dual point theta = s*(A y - b~), s = min(1, lambda/||A^T(A y - b~)||_inf).
GapParts duality_gap_parts(const LassoSubproblem& sub, const Vector& y);
double duality_gap(const LassoSubproblem& sub, const Vector& y);

/// Acceptance test on the smooth part of an inner iterate.
struct DecreaseGuard {
  /// Empty: every iterate passes.
  std::function<bool(const Vector& y, double smooth_value)> accept;
  /// When set, guard failures are compared with this level to detect that no
  /// later iterate can pass.
  std::optional<double> f_reference;

  bool passes(const Vector& y, double f) const { return !accept || accept(y, f); }

  static DecreaseGuard none() { return {}; }
  /// Passes iff 0.5*||A y - b~||^2 <= f_reference.
  static DecreaseGuard monotone(double f_reference);
};

struct SubsolverOptions {
  long max_inner = 100000;
  /// Record P at every accepted inner iterate.
  bool record_trace = false;
  /// Recompute the inner residual from scratch this often.
  int residual_refresh = 50;
};

struct SubsolverResult {
  Vector y;
  double duality_gap = 0.0;
  double primal = 0.0;
  double smooth_value = 0.0;
  long inner_iterations = 0;
  bool f_decrease_satisfied = true;
  bool converged = false;
  /// Stopped early because no later iterate could pass the guard.
  bool guard_unattainable = false;
  int curvature_increases = 0;
  double wall_time = 0.0;
  std::vector<double> primal_trace;
};

/// Projected gradient on the lifted problem over (y+, y-) >= 0 with step
/// 1/curvature, warm-started at y0. Stops once the duality gap is <= delta
/// and the guard passes (delta = 0 asks for a gap <= 1e-12*(1 + |P(y0)|)).
SubsolverResult box_gp_solve(const LassoSubproblem& sub, const Vector& y0, double delta,
                             const DecreaseGuard& guard = DecreaseGuard::none(),
                             const SubsolverOptions& options = {});

struct ProxReference {
  Vector minimizer;
  double value = 0.0;
  double duality_gap = 0.0;
};

/// High-accuracy minimum of a prox query (l1 only): gradient projection to
/// machine precision followed by a support-restricted Newton polish.
ProxReference reference_prox_minimum(const ProxQuery& query);

}  // namespace icbpg

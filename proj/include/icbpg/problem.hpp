#pragma once

// Block-separable composite problem F(x) = 0.5*||Ax - b||^2 + sum_i lambda_i*||x_i||_1.
//
// Blocks are contiguous column ranges of A. Any permutation of coordinates
// into blocks is applied once when a dataset is assembled, so the block
// selection matrices never need to be formed.

#include <memory>
#include <optional>
#include <vector>

#include "icbpg/kernels.hpp"
#include "icbpg/types.hpp"

namespace icbpg {

class BlockPartition {
 public:
  BlockPartition() = default;
  explicit BlockPartition(std::vector<Index> sizes);

  /// p near-equal blocks; the n mod p leftover coordinates go to the leading blocks.
  static BlockPartition near_equal(Index n, Index p);

  Index blocks() const { return static_cast<Index>(sizes_.size()); }
  Index dimension() const { return offsets_.empty() ? 0 : offsets_.back(); }
  Index begin(Index i) const { return offsets_.at(static_cast<std::size_t>(i)); }
  Index end(Index i) const { return offsets_.at(static_cast<std::size_t>(i) + 1); }
  Index size(Index i) const { return sizes_.at(static_cast<std::size_t>(i)); }
  const std::vector<Index>& sizes() const { return sizes_; }

  void check_block(Index i) const;

  auto segment(Vector& x, Index i) const { return x.segment(begin(i), size(i)); }
  auto segment(const Vector& x, Index i) const { return x.segment(begin(i), size(i)); }

 private:
  std::vector<Index> sizes_;
  std::vector<Index> offsets_;
};

/// Symmetric positive-definite block metric B_i.
///
/// Three storage forms: a dense Cholesky factorization (small blocks and
/// explicit matrices), the Gram operator A_i^T A_i applied matrix-free with
/// conjugate-gradient solves (large blocks), and c*I.
class BlockMetric {
 public:
  enum class Kind { Dense, GramOperator, ScaledIdentity };

  /// Factorizes an explicit SPD matrix; throws SingularMetricError otherwise.
  static BlockMetric dense(Matrix b);
  /// B = A_i^T A_i. Dense Cholesky when n_i <= dense_limit, CG otherwise.
  static BlockMetric gram(std::shared_ptr<const SparseMatrix> a, Index begin, Index end,
                          Index dense_limit = 2000);
  static BlockMetric scaled_identity(Index n, double c);

  Kind kind() const { return kind_; }
  bool from_gram() const { return gram_source_ != nullptr; }
  Index dimension() const { return n_; }
  double identity_scale() const { return scale_; }

  Vector apply(const Vector& t) const;
  /// B^{-1} v; throws SingularMetricError when the solve fails.
  Vector solve(const Vector& v) const;
  double norm(const Vector& t) const;
  double dual_norm(const Vector& v) const;
  double squared_norm(const Vector& t) const;
  double squared_dual_norm(const Vector& v) const;

  /// Dense copy of B (small blocks only; tests and reference solvers).
  Matrix to_dense() const;
  /// Upper factor R with B = R^T R, dense.
  Matrix upper_factor() const;

  /// Columns that generated a Gram metric, if any.
  std::optional<kernels::ColumnRange> gram_columns() const;

 private:
  Kind kind_ = Kind::ScaledIdentity;
  Index n_ = 0;
  double scale_ = 1.0;
  Matrix dense_;
  Eigen::LLT<Matrix> llt_;
  std::shared_ptr<const SparseMatrix> gram_source_;
  Index gram_begin_ = 0;
  Index gram_end_ = 0;
};

/// f(x) = 0.5*||Ax - b||^2 with per-block column access.
class QuadraticSmoothTerm {
 public:
  QuadraticSmoothTerm(SparseMatrix a, Vector b);

  Index rows() const { return a_->rows(); }
  Index cols() const { return a_->cols(); }
  const SparseMatrix& matrix() const { return *a_; }
  std::shared_ptr<const SparseMatrix> shared_matrix() const { return a_; }
  const SparseRowMatrix& row_matrix() const { return rows_; }
  const Vector& rhs() const { return b_; }

  kernels::ColumnRange columns(Index begin, Index end) const { return {a_.get(), begin, end}; }

  /// Ax - b.
  Vector residual(const Vector& x, kernels::Execution e = kernels::Execution::Serial) const;
  double value(const Vector& x, kernels::Execution e = kernels::Execution::Serial) const;
  /// A^T (Ax - b).
  Vector gradient(const Vector& x, kernels::Execution e = kernels::Execution::Serial) const;

 private:
  std::shared_ptr<const SparseMatrix> a_;
  SparseRowMatrix rows_;
  Vector b_;
};

enum class MetricFamily {
  Gram,      ///< B_i = A_i^T A_i, L_i = 1
  Identity,  ///< B_i = I, L_i = ||A_i||_2^2
};

struct ProblemOptions {
  MetricFamily family = MetricFamily::Gram;
  Index dense_limit = 2000;
};

class CompositeProblem {
 public:
  CompositeProblem(SparseMatrix a, Vector b, BlockPartition partition, std::vector<double> lambdas,
                   ProblemOptions options = {});
  /// Same l1 weight on every block.
  CompositeProblem(SparseMatrix a, Vector b, BlockPartition partition, double lambda,
                   ProblemOptions options = {});

  const QuadraticSmoothTerm& smooth() const { return smooth_; }
  const BlockPartition& partition() const { return partition_; }
  MetricFamily family() const { return options_.family; }
  Index dimension() const { return partition_.dimension(); }
  Index blocks() const { return partition_.blocks(); }

  const BlockMetric& metric(Index i) const { return *metrics_.at(static_cast<std::size_t>(i)); }
  std::shared_ptr<const BlockMetric> shared_metric(Index i) const {
    return metrics_.at(static_cast<std::size_t>(i));
  }
  double lipschitz(Index i) const { return lipschitz_.at(static_cast<std::size_t>(i)); }
  double lambda(Index i) const { return lambdas_.at(static_cast<std::size_t>(i)); }
  double l_min() const { return l_min_; }
  double l_max() const { return l_max_; }
  /// Global pre-conditioned smoothness constant in use (default bound unless refined).
  double l_f() const { return l_f_; }
  void set_l_f(double l_f);

  kernels::ColumnRange block_columns(Index i) const {
    return smooth_.columns(partition_.begin(i), partition_.end(i));
  }

 private:
  QuadraticSmoothTerm smooth_;
  BlockPartition partition_;
  std::vector<double> lambdas_;
  ProblemOptions options_;
  std::vector<std::shared_ptr<const BlockMetric>> metrics_;
  std::vector<double> lipschitz_;
  double l_min_ = 0.0;
  double l_max_ = 0.0;
  double l_f_ = 0.0;
};

double regularizer_value(const CompositeProblem& problem, const Vector& x);
double full_objective(const CompositeProblem& problem, const Vector& x);
/// A_i^T (Ax - b).
Vector block_gradient(const CompositeProblem& problem, const Vector& x, Index i);
double block_norm(const CompositeProblem& problem, const Vector& t, Index i);
double block_dual_norm(const CompositeProblem& problem, const Vector& v, Index i);
double global_B_norm(const CompositeProblem& problem, const Vector& x);

struct SmoothnessEstimate {
  double bound = 0.0;            ///< always-valid closed-form constant
  std::optional<double> refined; ///< power-iteration constant when requested
  double value() const { return refined ? std::min(bound, *refined) : bound; }
};

/// Gram family: bound = p. Identity family: bound = sum_i L_i.
SmoothnessEstimate estimate_global_smoothness(const CompositeProblem& problem, bool refine = false,
                                              int max_iterations = 500);

/// f(x + U_i t) - [f(x) + <grad_i f(x), t> + (L_i/2)||t||_(i)^2]; <= 0 when the
/// block smoothness inequality holds.
double verify_block_smoothness(const CompositeProblem& problem, const Vector& x, const Vector& t,
                               Index i);

/// Largest eigenvalue of A_range^T A_range by power iteration from the all-ones vector.
double power_iteration_gram(const kernels::ColumnRange& a, int iterations, double rel_tol = 0.0);

}  // namespace icbpg

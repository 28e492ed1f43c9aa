#include "icbpg/problem.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

namespace icbpg {

namespace k = kernels;

// ---------------------------------------------------------------- partition

BlockPartition::BlockPartition(std::vector<Index> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty()) throw std::invalid_argument("partition needs at least one block");
  offsets_.assign(sizes_.size() + 1, 0);
  for (std::size_t i = 0; i < sizes_.size(); ++i) {
    if (sizes_[i] <= 0) throw std::invalid_argument("block sizes must be positive");
    offsets_[i + 1] = offsets_[i] + sizes_[i];
  }
}

BlockPartition BlockPartition::near_equal(Index n, Index p) {
  if (p <= 0 || n < p) throw std::invalid_argument("need 1 <= p <= n");
  std::vector<Index> sizes(static_cast<std::size_t>(p), n / p);
  for (Index i = 0; i < n % p; ++i) ++sizes[static_cast<std::size_t>(i)];
  return BlockPartition(std::move(sizes));
}

void BlockPartition::check_block(Index i) const {
  if (i < 0 || i >= blocks()) {
    throw std::out_of_range("block index " + std::to_string(i) + " out of range [0, " +
                            std::to_string(blocks()) + ")");
  }
}

// ---------------------------------------------------------------- metric

BlockMetric BlockMetric::dense(Matrix b) {
  if (b.rows() != b.cols()) throw DimensionError("metric must be square");
  BlockMetric m;
  m.kind_ = Kind::Dense;
  m.n_ = b.rows();
  m.dense_ = std::move(b);
  m.llt_.compute(m.dense_);
  if (m.llt_.info() != Eigen::Success) throw SingularMetricError("metric is not positive definite");
  return m;
}

BlockMetric BlockMetric::gram(std::shared_ptr<const SparseMatrix> a, Index begin, Index end,
                              Index dense_limit) {
  const Index n = end - begin;
  if (n <= 0 || begin < 0 || end > a->cols()) throw std::out_of_range("bad gram column range");
  BlockMetric m;
  if (n <= dense_limit) {
    const SparseMatrix cols = a->middleCols(begin, n);
    m = dense(Matrix(cols.transpose() * cols));
  } else {
    m.kind_ = Kind::GramOperator;
    m.n_ = n;
  }
  m.gram_source_ = std::move(a);
  m.gram_begin_ = begin;
  m.gram_end_ = end;
  return m;
}

BlockMetric BlockMetric::scaled_identity(Index n, double c) {
  if (!(c > 0.0)) throw SingularMetricError("identity scale must be positive");
  BlockMetric m;
  m.kind_ = Kind::ScaledIdentity;
  m.n_ = n;
  m.scale_ = c;
  return m;
}

std::optional<k::ColumnRange> BlockMetric::gram_columns() const {
  if (!gram_source_) return std::nullopt;
  return k::ColumnRange{gram_source_.get(), gram_begin_, gram_end_};
}

Vector BlockMetric::apply(const Vector& t) const {
  require_size(t.size(), n_, "metric apply");
  switch (kind_) {
    case Kind::Dense:
      return dense_ * t;
    case Kind::ScaledIdentity:
      return scale_ * t;
    case Kind::GramOperator: {
      const auto cols = *gram_columns();
      Vector w = Vector::Zero(cols.rows());
      k::serial::scatter_add(cols, k::view(t), k::view(w));
      Vector out(n_);
      k::serial::gather(cols, k::view(w), k::view(out));
      return out;
    }
  }
  return {};
}

Vector BlockMetric::solve(const Vector& v) const {
  require_size(v.size(), n_, "metric solve");
  switch (kind_) {
    case Kind::Dense:
      return llt_.solve(v);
    case Kind::ScaledIdentity:
      return v / scale_;
    case Kind::GramOperator: {
      // Conjugate gradients on A_i^T A_i y = v.
      Vector y = Vector::Zero(n_);
      Vector r = v;
      Vector p = r;
      double rr = r.squaredNorm();
      const double stop = 1e-24 * std::max(rr, 1e-300);
      const Index max_iter = 10 * n_ + 100;
      for (Index it = 0; it < max_iter && rr > stop; ++it) {
        const Vector bp = apply(p);
        const double pbp = p.dot(bp);
        if (!(pbp > 0.0)) throw SingularMetricError("Gram metric is singular (CG breakdown)");
        const double alpha = rr / pbp;
        y += alpha * p;
        r -= alpha * bp;
        const double rr_new = r.squaredNorm();
        p = r + (rr_new / rr) * p;
        rr = rr_new;
      }
      if (rr > std::max(stop, 1e-20 * v.squaredNorm())) {
        throw SingularMetricError("Gram metric solve did not converge");
      }
      return y;
    }
  }
  return {};
}

double BlockMetric::squared_norm(const Vector& t) const {
  if (kind_ == Kind::ScaledIdentity) return scale_ * t.squaredNorm();
  return std::max(0.0, t.dot(apply(t)));
}

double BlockMetric::squared_dual_norm(const Vector& v) const {
  if (kind_ == Kind::ScaledIdentity) return v.squaredNorm() / scale_;
  return std::max(0.0, v.dot(solve(v)));
}

double BlockMetric::norm(const Vector& t) const { return std::sqrt(squared_norm(t)); }
double BlockMetric::dual_norm(const Vector& v) const { return std::sqrt(squared_dual_norm(v)); }

Matrix BlockMetric::to_dense() const {
  switch (kind_) {
    case Kind::Dense:
      return dense_;
    case Kind::ScaledIdentity:
      return scale_ * Matrix::Identity(n_, n_);
    case Kind::GramOperator: {
      const SparseMatrix cols = gram_source_->middleCols(gram_begin_, n_);
      return Matrix(cols.transpose() * cols);
    }
  }
  return {};
}

Matrix BlockMetric::upper_factor() const {
  switch (kind_) {
    case Kind::Dense:
      return llt_.matrixU();
    case Kind::ScaledIdentity:
      return std::sqrt(scale_) * Matrix::Identity(n_, n_);
    case Kind::GramOperator: {
      Eigen::LLT<Matrix> llt(to_dense());
      if (llt.info() != Eigen::Success) throw SingularMetricError("Gram metric is singular");
      return llt.matrixU();
    }
  }
  return {};
}

// ---------------------------------------------------------------- smooth term

namespace {
std::shared_ptr<const SparseMatrix> compressed(SparseMatrix a) {
  a.makeCompressed();
  return std::make_shared<const SparseMatrix>(std::move(a));
}
}  // namespace

QuadraticSmoothTerm::QuadraticSmoothTerm(SparseMatrix a, Vector b)
    : a_(compressed(std::move(a))), rows_(*a_), b_(std::move(b)) {
  require_size(b_.size(), a_->rows(), "right-hand side");
  rows_.makeCompressed();
}

Vector QuadraticSmoothTerm::residual(const Vector& x, k::Execution e) const {
  require_size(x.size(), cols(), "point");
  Vector r(rows());
  k::row_product(e, rows_, k::view(x), k::view(r));
  r -= b_;
  return r;
}

double QuadraticSmoothTerm::value(const Vector& x, k::Execution e) const {
  const Vector r = residual(x, e);
  return 0.5 * k::squared_norm(e, k::view(r));
}

Vector QuadraticSmoothTerm::gradient(const Vector& x, k::Execution e) const {
  const Vector r = residual(x, e);
  Vector g(cols());
  k::gather(e, columns(0, cols()), k::view(r), k::view(g));
  return g;
}

// ---------------------------------------------------------------- problem

CompositeProblem::CompositeProblem(SparseMatrix a, Vector b, BlockPartition partition,
                                   std::vector<double> lambdas, ProblemOptions options)
    : smooth_(std::move(a), std::move(b)),
      partition_(std::move(partition)),
      lambdas_(std::move(lambdas)),
      options_(options) {
  require_size(partition_.dimension(), smooth_.cols(), "partition");
  if (static_cast<Index>(lambdas_.size()) != partition_.blocks()) {
    throw DimensionError("need one regularization weight per block");
  }
  for (double l : lambdas_) {
    if (!(l >= 0.0)) throw std::invalid_argument("regularization weights must be >= 0");
  }
  const Index p = partition_.blocks();
  metrics_.reserve(static_cast<std::size_t>(p));
  lipschitz_.reserve(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) {
    if (options_.family == MetricFamily::Gram) {
      metrics_.push_back(std::make_shared<const BlockMetric>(BlockMetric::gram(
          smooth_.shared_matrix(), partition_.begin(i), partition_.end(i), options_.dense_limit)));
      lipschitz_.push_back(1.0);
    } else {
      const double l = power_iteration_gram(block_columns(i), 1000, 1e-14) * (1.0 + 1e-8);
      if (!(l > 0.0)) throw SingularMetricError("block has a zero column range");
      metrics_.push_back(
          std::make_shared<const BlockMetric>(BlockMetric::scaled_identity(partition_.size(i), 1.0)));
      lipschitz_.push_back(l);
    }
  }
  l_min_ = *std::min_element(lipschitz_.begin(), lipschitz_.end());
  l_max_ = *std::max_element(lipschitz_.begin(), lipschitz_.end());
  l_f_ = estimate_global_smoothness(*this).bound;
}

CompositeProblem::CompositeProblem(SparseMatrix a, Vector b, BlockPartition partition,
                                   double lambda, ProblemOptions options)
    : CompositeProblem(std::move(a), std::move(b), partition,
                       std::vector<double>(static_cast<std::size_t>(partition.blocks()), lambda),
                       options) {}

void CompositeProblem::set_l_f(double l_f) {
  if (!(l_f > 0.0)) throw std::invalid_argument("L_f must be positive");
  l_f_ = l_f;
}

double regularizer_value(const CompositeProblem& problem, const Vector& x) {
  require_size(x.size(), problem.dimension(), "point");
  const auto& part = problem.partition();
  double s = 0.0;
  for (Index i = 0; i < part.blocks(); ++i) s += problem.lambda(i) * part.segment(x, i).lpNorm<1>();
  return s;
}

double full_objective(const CompositeProblem& problem, const Vector& x) {
  require_size(x.size(), problem.dimension(), "point");
  return problem.smooth().value(x) + regularizer_value(problem, x);
}

Vector block_gradient(const CompositeProblem& problem, const Vector& x, Index i) {
  problem.partition().check_block(i);
  const Vector r = problem.smooth().residual(x);
  Vector g(problem.partition().size(i));
  k::serial::gather(problem.block_columns(i), k::view(r), k::view(g));
  return g;
}

double block_norm(const CompositeProblem& problem, const Vector& t, Index i) {
  problem.partition().check_block(i);
  return problem.metric(i).norm(t);
}

double block_dual_norm(const CompositeProblem& problem, const Vector& v, Index i) {
  problem.partition().check_block(i);
  return problem.metric(i).dual_norm(v);
}

double global_B_norm(const CompositeProblem& problem, const Vector& x) {
  require_size(x.size(), problem.dimension(), "point");
  const auto& part = problem.partition();
  double s = 0.0;
  for (Index i = 0; i < part.blocks(); ++i) {
    s += problem.metric(i).squared_norm(Vector(part.segment(x, i)));
  }
  return std::sqrt(s);
}

SmoothnessEstimate estimate_global_smoothness(const CompositeProblem& problem, bool refine,
                                              int max_iterations) {
  SmoothnessEstimate est;
  const auto& part = problem.partition();
  if (problem.family() == MetricFamily::Gram) {
    // ||At||^2 = ||sum_i A_i t_i||^2 <= p * sum_i ||A_i t_i||^2 = p ||t||_B^2.
    est.bound = static_cast<double>(part.blocks());
  } else {
    double s = 0.0;
    for (Index i = 0; i < part.blocks(); ++i) s += problem.lipschitz(i);
    est.bound = s;
  }
  if (!refine) return est;

  // Largest generalized eigenvalue of (A^T A, blockdiag(B_i)): iterate
  // t <- blockdiag(B)^{-1} A^T A t and track the Rayleigh quotient.
  const auto& f = problem.smooth();
  const Index n = problem.dimension();
  Vector t = Vector::Ones(n);
  double rayleigh = 0.0;
  for (int it = 0; it < max_iterations; ++it) {
    Vector at(f.rows());
    k::serial::row_product(f.row_matrix(), k::view(t), k::view(at));
    Vector ata(n);
    k::serial::gather(f.columns(0, n), k::view(at), k::view(ata));
    double tbt = 0.0;
    Vector next(n);
    for (Index i = 0; i < part.blocks(); ++i) {
      const Vector ti = part.segment(t, i);
      tbt += problem.metric(i).squared_norm(ti);
      part.segment(next, i) = problem.metric(i).solve(Vector(part.segment(ata, i)));
    }
    const double q = at.squaredNorm() / tbt;
    const bool done = it > 0 && std::abs(q - rayleigh) <= 1e-13 * q;
    rayleigh = std::max(rayleigh, q);
    if (done) break;
    t = next / next.norm();
  }
  est.refined = rayleigh * (1.0 + 1e-6);
  return est;
}

double verify_block_smoothness(const CompositeProblem& problem, const Vector& x, const Vector& t,
                               Index i) {
  const auto& part = problem.partition();
  part.check_block(i);
  require_size(t.size(), part.size(i), "block step");
  Vector moved = x;
  part.segment(moved, i) += t;
  const double f_x = problem.smooth().value(x);
  const double f_moved = problem.smooth().value(moved);
  const Vector g = block_gradient(problem, x, i);
  return f_moved - (f_x + g.dot(t) + 0.5 * problem.lipschitz(i) * problem.metric(i).squared_norm(t));
}

double power_iteration_gram(const k::ColumnRange& a, int iterations, double rel_tol) {
  Vector v = Vector::Ones(a.cols()) / std::sqrt(static_cast<double>(a.cols()));
  Vector w(a.rows());
  Vector z(a.cols());
  double best = 0.0;
  for (int it = 0; it < iterations; ++it) {
    w.setZero();
    k::serial::scatter_add(a, k::view(v), k::view(w));
    const double q = w.squaredNorm();  // Rayleigh quotient, ||v|| = 1
    const bool done = rel_tol > 0.0 && it > 0 && std::abs(q - best) <= rel_tol * q;
    best = std::max(best, q);
    if (done) break;
    k::serial::gather(a, k::view(w), k::view(z));
    const double nz = z.norm();
    if (nz == 0.0) break;
    v = z / nz;
  }
  return best;
}

}  // namespace icbpg

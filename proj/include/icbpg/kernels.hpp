#pragma once

// Sparse kernels used by the solver and the diagnostics.
//
// Every kernel exists twice: a serial reference in `serial::` and an OpenMP
// version in `parallel::`. The gather and row kernels assign one output entry
// per loop iteration with a fixed summation order, so both versions produce
// bitwise-identical results regardless of the thread count. Reductions over
// long vectors use fixed-size chunks whose partial sums are combined in chunk
// order; that order does not depend on the thread count either.

#include <span>

#include "icbpg/types.hpp"

namespace icbpg::kernels {

enum class Execution { Serial, Parallel };

/// Non-owning view of a contiguous column range of a column-compressed matrix.
struct ColumnRange {
  const SparseMatrix* matrix = nullptr;
  Index begin = 0;
  Index end = 0;

  Index rows() const { return matrix->rows(); }
  Index cols() const { return end - begin; }
  Index nonzeros() const;
};

inline constexpr Index kReductionChunk = 4096;

namespace serial {

/// out[j] = sum_k A(k, begin + j) * v[k]
void gather(const ColumnRange& a, std::span<const double> v, std::span<double> out);
/// out += A[:, begin:end] * y
void scatter_add(const ColumnRange& a, std::span<const double> y, std::span<double> out);
/// out[r] = sum_c A(r, c) * x[c], row-major traversal.
void row_product(const SparseRowMatrix& a, std::span<const double> x, std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);

}  // namespace serial

namespace parallel {

void gather(const ColumnRange& a, std::span<const double> v, std::span<double> out);
/// Column-partitioned with thread-private accumulators; deterministic for a
/// fixed thread count but not bitwise equal to the serial scatter.
void scatter_add(const ColumnRange& a, std::span<const double> y, std::span<double> out);
void row_product(const SparseRowMatrix& a, std::span<const double> x, std::span<double> out);
double dot(std::span<const double> a, std::span<const double> b);
double squared_norm(std::span<const double> a);

}  // namespace parallel

// Dispatching helpers.
void gather(Execution e, const ColumnRange& a, std::span<const double> v, std::span<double> out);
void row_product(Execution e, const SparseRowMatrix& a, std::span<const double> x,
                 std::span<double> out);
double dot(Execution e, std::span<const double> a, std::span<const double> b);
double squared_norm(Execution e, std::span<const double> a);

inline std::span<const double> view(const Vector& v) {
  return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<double> view(Vector& v) { return {v.data(), static_cast<std::size_t>(v.size())}; }

/// Number of worker threads the parallel kernels will use.
int max_threads();

}  // namespace icbpg::kernels

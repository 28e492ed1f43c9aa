#include "icbpg/kernels.hpp"

#include <algorithm>
#include <vector>

#include <omp.h>

namespace icbpg::kernels {

Index ColumnRange::nonzeros() const {
  const int* outer = matrix->outerIndexPtr();
  return static_cast<Index>(outer[end] - outer[begin]);
}

namespace {

void check_gather(const ColumnRange& a, std::span<const double> v, std::span<double> out) {
  require_size(static_cast<Index>(v.size()), a.rows(), "gather input");
  require_size(static_cast<Index>(out.size()), a.cols(), "gather output");
}

inline double column_dot(const SparseMatrix& m, Index col, std::span<const double> v) {
  const int* outer = m.outerIndexPtr();
  const int* inner = m.innerIndexPtr();
  const double* val = m.valuePtr();
  double s = 0.0;
  for (int p = outer[col]; p < outer[col + 1]; ++p) s += val[p] * v[inner[p]];
  return s;
}

inline double row_dot(const SparseRowMatrix& m, Index row, std::span<const double> x) {
  const int* outer = m.outerIndexPtr();
  const int* inner = m.innerIndexPtr();
  const double* val = m.valuePtr();
  double s = 0.0;
  for (int p = outer[row]; p < outer[row + 1]; ++p) s += val[p] * x[inner[p]];
  return s;
}

inline double chunk_dot(const double* a, const double* b, std::size_t n) {
  double s = 0.0;
  for (std::size_t i = 0; i < n; ++i) s += a[i] * b[i];
  return s;
}

std::size_t chunk_count(std::size_t n) {
  return (n + kReductionChunk - 1) / kReductionChunk;
}

}  // namespace

namespace serial {

void gather(const ColumnRange& a, std::span<const double> v, std::span<double> out) {
  check_gather(a, v, out);
  for (Index j = 0; j < a.cols(); ++j) out[j] = column_dot(*a.matrix, a.begin + j, v);
}

void scatter_add(const ColumnRange& a, std::span<const double> y, std::span<double> out) {
  require_size(static_cast<Index>(y.size()), a.cols(), "scatter input");
  require_size(static_cast<Index>(out.size()), a.rows(), "scatter output");
  const int* outer = a.matrix->outerIndexPtr();
  const int* inner = a.matrix->innerIndexPtr();
  const double* val = a.matrix->valuePtr();
  for (Index j = 0; j < a.cols(); ++j) {
    const double yj = y[j];
    if (yj == 0.0) continue;
    for (int p = outer[a.begin + j]; p < outer[a.begin + j + 1]; ++p) out[inner[p]] += val[p] * yj;
  }
}

void row_product(const SparseRowMatrix& a, std::span<const double> x, std::span<double> out) {
  require_size(static_cast<Index>(x.size()), a.cols(), "row product input");
  require_size(static_cast<Index>(out.size()), a.rows(), "row product output");
  for (Index r = 0; r < a.rows(); ++r) out[r] = row_dot(a, r, x);
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_size(static_cast<Index>(b.size()), static_cast<Index>(a.size()), "dot");
  const std::size_t n = a.size();
  double total = 0.0;
  for (std::size_t c = 0; c < chunk_count(n); ++c) {
    const std::size_t lo = c * kReductionChunk;
    const std::size_t len = std::min<std::size_t>(kReductionChunk, n - lo);
    total += chunk_dot(a.data() + lo, b.data() + lo, len);
  }
  return total;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

}  // namespace serial

namespace parallel {

void gather(const ColumnRange& a, std::span<const double> v, std::span<double> out) {
  check_gather(a, v, out);
  const Index cols = a.cols();
#pragma omp parallel for schedule(static)
  for (Index j = 0; j < cols; ++j) out[j] = column_dot(*a.matrix, a.begin + j, v);
}

void scatter_add(const ColumnRange& a, std::span<const double> y, std::span<double> out) {
  require_size(static_cast<Index>(y.size()), a.cols(), "scatter input");
  require_size(static_cast<Index>(out.size()), a.rows(), "scatter output");
  const int threads = omp_get_max_threads();
  if (threads == 1) {
    serial::scatter_add(a, y, out);
    return;
  }
  const Index rows = a.rows();
  std::vector<std::vector<double>> partial(static_cast<std::size_t>(threads));
  const int* outer = a.matrix->outerIndexPtr();
  const int* inner = a.matrix->innerIndexPtr();
  const double* val = a.matrix->valuePtr();
#pragma omp parallel num_threads(threads)
  {
    const int t = omp_get_thread_num();
    auto& acc = partial[static_cast<std::size_t>(t)];
    acc.assign(static_cast<std::size_t>(rows), 0.0);
    const Index cols = a.cols();
    const Index lo = cols * t / threads;
    const Index hi = cols * (t + 1) / threads;
    for (Index j = lo; j < hi; ++j) {
      const double yj = y[j];
      if (yj == 0.0) continue;
      for (int p = outer[a.begin + j]; p < outer[a.begin + j + 1]; ++p) acc[inner[p]] += val[p] * yj;
    }
  }
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < rows; ++r) {
    double s = 0.0;
    for (int t = 0; t < threads; ++t) s += partial[static_cast<std::size_t>(t)][r];
    out[r] += s;
  }
}

void row_product(const SparseRowMatrix& a, std::span<const double> x, std::span<double> out) {
  require_size(static_cast<Index>(x.size()), a.cols(), "row product input");
  require_size(static_cast<Index>(out.size()), a.rows(), "row product output");
  const Index rows = a.rows();
#pragma omp parallel for schedule(static)
  for (Index r = 0; r < rows; ++r) out[r] = row_dot(a, r, x);
}

double dot(std::span<const double> a, std::span<const double> b) {
  require_size(static_cast<Index>(b.size()), static_cast<Index>(a.size()), "dot");
  const std::size_t n = a.size();
  const std::size_t chunks = chunk_count(n);
  std::vector<double> partial(chunks, 0.0);
#pragma omp parallel for schedule(static)
  for (std::size_t c = 0; c < chunks; ++c) {
    const std::size_t lo = c * kReductionChunk;
    const std::size_t len = std::min<std::size_t>(kReductionChunk, n - lo);
    partial[c] = chunk_dot(a.data() + lo, b.data() + lo, len);
  }
  double total = 0.0;
  for (double p : partial) total += p;
  return total;
}

double squared_norm(std::span<const double> a) { return dot(a, a); }

}  // namespace parallel

void gather(Execution e, const ColumnRange& a, std::span<const double> v, std::span<double> out) {
  e == Execution::Serial ? serial::gather(a, v, out) : parallel::gather(a, v, out);
}

void row_product(Execution e, const SparseRowMatrix& a, std::span<const double> x,
                 std::span<double> out) {
  e == Execution::Serial ? serial::row_product(a, x, out) : parallel::row_product(a, x, out);
}

double dot(Execution e, std::span<const double> a, std::span<const double> b) {
  return e == Execution::Serial ? serial::dot(a, b) : parallel::dot(a, b);
}

double squared_norm(Execution e, std::span<const double> a) {
  return e == Execution::Serial ? serial::squared_norm(a) : parallel::squared_norm(a);
}

int max_threads() { return omp_get_max_threads(); }

}  // namespace icbpg::kernels

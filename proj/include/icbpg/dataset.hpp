#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "icbpg/io.hpp"
#include "icbpg/problem.hpp"

namespace icbpg {

enum class Shape { Tall, Wide };
Shape parse_shape(const std::string& s);
std::string to_string(Shape s);

struct DatasetSpec {
  Shape shape = Shape::Tall;
  /// Rows; columns are N/2 (tall) or 2N (wide).
  Index N = 2000;
  Index nnz_per_col = 20;
  Index p = 10;
  /// Defaults to 0.1 (tall) or 0.01 (wide).
  std::optional<double> lambda;
  std::uint64_t seed = 1;

  Index rows() const { return N; }
  Index cols() const { return shape == Shape::Tall ? N / 2 : 2 * N; }
  double lambda_value() const { return lambda ? *lambda : (shape == Shape::Tall ? 0.1 : 0.01); }
};

struct Dataset {
  DatasetSpec spec;
  SparseMatrix A;
  Vector b;
  BlockPartition partition;
  double lambda = 0.0;
  io::Manifest manifest;
};

/// Each column gets nnz_per_col distinct uniformly chosen rows with U[0,1]
/// values; block i additionally gets the n_i x n_i identity in its top rows.
/// b is a normalized standard Gaussian vector.
Dataset generate_dataset(const DatasetSpec& spec);

/// Writes A.mtx, b.txt and manifest.txt into `dir` (created if missing).
void write_dataset(const Dataset& d, const std::filesystem::path& dir);
Dataset load_dataset(const std::filesystem::path& dir);

CompositeProblem make_problem(const Dataset& d, ProblemOptions options = {});

}  // namespace icbpg

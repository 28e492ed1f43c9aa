#include "icbpg/dataset.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>
#include <vector>

#include "icbpg/rng.hpp"

namespace icbpg {

namespace fs = std::filesystem;

Shape parse_shape(const std::string& s) {
  if (s == "tall") return Shape::Tall;
  if (s == "wide") return Shape::Wide;
  throw std::invalid_argument("shape must be tall or wide, got " + s);
}

std::string to_string(Shape s) { return s == Shape::Tall ? "tall" : "wide"; }

namespace {

// Floyd's sampling of k distinct values from [0, n), returned sorted.
std::vector<int> sample_rows(CounterRng& rng, Index n, Index k) {
  std::vector<int> chosen;
  chosen.reserve(static_cast<std::size_t>(k));
  for (Index j = n - k; j < n; ++j) {
    const int t = static_cast<int>(rng.below(static_cast<std::uint64_t>(j) + 1));
    if (std::find(chosen.begin(), chosen.end(), t) == chosen.end()) {
      chosen.push_back(t);
    } else {
      chosen.push_back(static_cast<int>(j));
    }
  }
  std::sort(chosen.begin(), chosen.end());
  return chosen;
}

std::string join(const std::vector<Index>& v) {
  std::string s;
  for (std::size_t j = 0; j < v.size(); ++j) {
    if (j) s += ',';
    s += std::to_string(v[j]);
  }
  return s;
}

}  // namespace

Dataset generate_dataset(const DatasetSpec& spec) {
  if (spec.N <= 0 || spec.p <= 0 || spec.nnz_per_col < 0) throw std::invalid_argument("bad dataset spec");
  const Index m = spec.rows();
  const Index n = spec.cols();
  if (n < spec.p) throw std::invalid_argument("more blocks than columns");
  BlockPartition part = BlockPartition::near_equal(n, spec.p);
  for (Index i = 0; i < part.blocks(); ++i) {
    if (part.size(i) > m) {
      throw std::invalid_argument("block " + std::to_string(i) + " has more columns than A has rows");
    }
  }
  const Index per_col = std::min(spec.nnz_per_col, m);

  CounterRng rng(spec.seed, 1);
  std::vector<Eigen::Triplet<double, int>> trip;
  trip.reserve(static_cast<std::size_t>(n * (per_col + 1)));
  for (Index i = 0; i < part.blocks(); ++i) {
    for (Index l = 0; l < part.size(i); ++l) {
      const int col = static_cast<int>(part.begin(i) + l);
      for (int row : sample_rows(rng, m, per_col)) trip.emplace_back(row, col, rng.uniform());
      trip.emplace_back(static_cast<int>(l), col, 1.0);  // duplicates are summed
    }
  }
  Dataset d;
  d.spec = spec;
  d.A.resize(m, n);
  d.A.setFromTriplets(trip.begin(), trip.end());
  d.A.makeCompressed();

  CounterRng brng(spec.seed, 2);
  d.b.resize(m);
  for (Index r = 0; r < m; ++r) d.b[r] = brng.normal();
  d.b /= d.b.norm();

  d.partition = std::move(part);
  d.lambda = spec.lambda_value();

  io::Manifest& mf = d.manifest;
  mf.set("shape", to_string(spec.shape));
  mf.set("N", static_cast<long long>(spec.N));
  mf.set("m", static_cast<long long>(m));
  mf.set("n", static_cast<long long>(n));
  mf.set("p", static_cast<long long>(spec.p));
  mf.set("block_sizes", join(d.partition.sizes()));
  mf.set("lambda", d.lambda);
  mf.set("nnz_per_col", static_cast<long long>(spec.nnz_per_col));
  mf.set("seed", std::to_string(spec.seed));
  mf.set("rng", std::string(CounterRng::kName));
  mf.set("identity_padding", std::string("top_rows"));
  return d;
}

void write_dataset(const Dataset& d, const fs::path& dir) {
  fs::create_directories(dir);
  io::write_matrix_market(d.A, dir / "A.mtx");
  io::write_vector(d.b, dir / "b.txt");
  d.manifest.write(dir / "manifest.txt");
}

Dataset load_dataset(const fs::path& dir) {
  Dataset d;
  d.manifest = io::Manifest::read(dir / "manifest.txt");
  d.A = io::read_matrix_market(dir / "A.mtx");
  d.b = io::read_vector(dir / "b.txt");
  const io::Manifest& mf = d.manifest;
  d.spec.shape = parse_shape(mf.get("shape"));
  d.spec.N = mf.get_int("N");
  d.spec.p = mf.get_int("p");
  d.spec.nnz_per_col = mf.get_int("nnz_per_col");
  d.spec.seed = std::stoull(mf.get("seed"));
  d.lambda = mf.get_double("lambda");
  d.spec.lambda = d.lambda;
  std::vector<Index> sizes;
  for (long long s : mf.get_int_list("block_sizes")) sizes.push_back(static_cast<Index>(s));
  d.partition = BlockPartition(std::move(sizes));
  require_size(d.A.rows(), mf.get_int("m"), "matrix rows");
  require_size(d.A.cols(), mf.get_int("n"), "matrix columns");
  require_size(d.b.size(), d.A.rows(), "right-hand side");
  require_size(d.partition.dimension(), d.A.cols(), "block layout");
  return d;
}

CompositeProblem make_problem(const Dataset& d, ProblemOptions options) {
  return CompositeProblem(d.A, d.b, d.partition, d.lambda, options);
}

}  // namespace icbpg

#include "icbpg/io.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <fstream>
#include <sstream>

namespace icbpg::io {

namespace {

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::ofstream open_out(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path.string());
  return out;
}

std::ifstream open_in(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path.string());
  return in;
}

}  // namespace

void write_matrix_market(const SparseMatrix& a, std::ostream& out) {
  out << "%%MatrixMarket matrix coordinate real general\n";
  out << a.rows() << ' ' << a.cols() << ' ' << a.nonZeros() << '\n';
  char buf[80];
  for (Index c = 0; c < a.outerSize(); ++c) {
    for (SparseMatrix::InnerIterator it(a, c); it; ++it) {
      std::snprintf(buf, sizeof buf, "%lld %lld %.17g\n", static_cast<long long>(it.row() + 1),
                    static_cast<long long>(c + 1), it.value());
      out << buf;
    }
  }
}

void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path) {
  auto out = open_out(path);
  write_matrix_market(a, out);
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

SparseMatrix read_matrix_market(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) throw FormatError("empty Matrix Market stream");
  std::istringstream header(line);
  std::string banner, object, format, field, symmetry;
  header >> banner >> object >> format >> field >> symmetry;
  if (banner != "%%MatrixMarket" || lower(object) != "matrix" || lower(format) != "coordinate") {
    throw FormatError("unsupported Matrix Market header: " + line);
  }
  field = lower(field);
  symmetry = lower(symmetry);
  if (field != "real" && field != "integer") throw FormatError("unsupported field: " + field);
  if (symmetry != "general" && symmetry != "symmetric") {
    throw FormatError("unsupported symmetry: " + symmetry);
  }
  while (std::getline(in, line)) {
    if (!line.empty() && line[0] != '%') break;
  }
  long long rows = 0, cols = 0, nnz = 0;
  {
    std::istringstream size(line);
    if (!(size >> rows >> cols >> nnz) || rows < 0 || cols < 0 || nnz < 0) {
      throw FormatError("bad size line: " + line);
    }
  }
  std::vector<Eigen::Triplet<double, int>> triplets;
  triplets.reserve(static_cast<std::size_t>(symmetry == "symmetric" ? 2 * nnz : nnz));
  for (long long e = 0; e < nnz; ++e) {
    long long r = 0, c = 0;
    double v = 0.0;
    if (!(in >> r >> c >> v)) throw FormatError("truncated entry list at entry " + std::to_string(e));
    if (r < 1 || r > rows || c < 1 || c > cols) throw FormatError("entry index out of range");
    triplets.emplace_back(static_cast<int>(r - 1), static_cast<int>(c - 1), v);
    if (symmetry == "symmetric" && r != c) {
      triplets.emplace_back(static_cast<int>(c - 1), static_cast<int>(r - 1), v);
    }
  }
  SparseMatrix a(static_cast<Index>(rows), static_cast<Index>(cols));
  a.setFromTriplets(triplets.begin(), triplets.end());
  a.makeCompressed();
  return a;
}

SparseMatrix read_matrix_market(const std::filesystem::path& path) {
  auto in = open_in(path);
  return read_matrix_market(in);
}

void write_vector(const Vector& v, const std::filesystem::path& path) {
  auto out = open_out(path);
  for (Index j = 0; j < v.size(); ++j) out << format_double(v[j]) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Vector read_vector(const std::filesystem::path& path) {
  auto in = open_in(path);
  std::vector<double> values;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::size_t used = 0;
    try {
      values.push_back(std::stod(line, &used));
    } catch (const std::exception&) {
      throw FormatError("bad vector entry: " + line);
    }
  }
  return Eigen::Map<const Vector>(values.data(), static_cast<Index>(values.size()));
}

void Manifest::set(const std::string& key, const std::string& value) {
  if (key.empty() || key.find('=') != std::string::npos || value.find('\n') != std::string::npos) {
    throw std::invalid_argument("invalid manifest entry: " + key);
  }
  values_[key] = value;
}

void Manifest::set(const std::string& key, double value) { set(key, format_double(value)); }
void Manifest::set(const std::string& key, long long value) { set(key, std::to_string(value)); }

const std::string& Manifest::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw FormatError("manifest is missing key '" + key + "'");
  return it->second;
}

std::optional<std::string> Manifest::find(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) return std::nullopt;
  return it->second;
}

double Manifest::get_double(const std::string& key) const {
  const std::string& s = get(key);
  try {
    return std::stod(s);
  } catch (const std::exception&) {
    throw FormatError("manifest key '" + key + "' is not a number: " + s);
  }
}

long long Manifest::get_int(const std::string& key) const {
  const std::string& s = get(key);
  try {
    return std::stoll(s);
  } catch (const std::exception&) {
    throw FormatError("manifest key '" + key + "' is not an integer: " + s);
  }
}

std::vector<long long> Manifest::get_int_list(const std::string& key) const {
  std::vector<long long> out;
  std::istringstream in(get(key));
  std::string item;
  while (std::getline(in, item, ',')) {
    try {
      out.push_back(std::stoll(item));
    } catch (const std::exception&) {
      throw FormatError("manifest key '" + key + "' has a bad list entry: " + item);
    }
  }
  return out;
}

void Manifest::write(const std::filesystem::path& path) const {
  auto out = open_out(path);
  for (const auto& [k, v] : values_) out << k << '=' << v << '\n';
  if (!out) throw std::runtime_error("write failed: " + path.string());
}

Manifest Manifest::read(const std::filesystem::path& path) {
  auto in = open_in(path);
  Manifest m;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw FormatError("manifest line without '=': " + line);
    m.values_[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

}  // namespace icbpg::io

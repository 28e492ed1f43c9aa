#pragma once

#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "icbpg/types.hpp"

namespace icbpg::io {

/// Raised on malformed input files.
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// "coordinate real general" Matrix Market; 1-based indices, %.17g values,
/// entries in column-major order.
void write_matrix_market(const SparseMatrix& a, std::ostream& out);
void write_matrix_market(const SparseMatrix& a, const std::filesystem::path& path);
/// Accepts coordinate real/integer general or symmetric matrices.
SparseMatrix read_matrix_market(std::istream& in);
SparseMatrix read_matrix_market(const std::filesystem::path& path);

/// One decimal value per line.
void write_vector(const Vector& v, const std::filesystem::path& path);
Vector read_vector(const std::filesystem::path& path);

/// key=value text, written in key order; '#' starts a comment line.
class Manifest {
 public:
  void set(const std::string& key, const std::string& value);
  void set(const std::string& key, double value);
  void set(const std::string& key, long long value);
  bool has(const std::string& key) const { return values_.count(key) > 0; }
  /// Throws FormatError when missing.
  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  long long get_int(const std::string& key) const;
  std::vector<long long> get_int_list(const std::string& key) const;
  std::optional<std::string> find(const std::string& key) const;

  void write(const std::filesystem::path& path) const;
  static Manifest read(const std::filesystem::path& path);

  const std::map<std::string, std::string>& entries() const { return values_; }

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace icbpg::io

#pragma once

// Randomized invariant suites behind the `verify` subcommand.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "icbpg/types.hpp"

namespace icbpg {

struct SuiteResult {
  std::string name;
  long checks = 0;
  long violations = 0;
  double seconds = 0.0;
  std::string detail;

  bool passed() const { return violations == 0 && checks > 0; }
};

struct VerifyOptions {
  /// Fewer instances and a smaller dataset.
  bool quick = false;
  /// Inflate v in every certificate before checking it (mutation test).
  bool inject_certificate_fault = false;
  /// Grid CSVs and summary.json go here when set.
  std::optional<std::filesystem::path> out_dir;
  std::uint64_t seed = 20240601;
};

struct VerifyReport {
  std::vector<SuiteResult> suites;
  bool passed() const;
  /// JSON object with one entry per suite.
  std::string to_json() const;
};

/// Certificate construction and value-gap membership agree on random small
/// prox queries with dense SPD metrics.
SuiteResult certificate_suite(int instances, std::uint64_t seed, bool inject_fault = false);
/// ||u - w||_B against the error-dependent Lipschitz bound for subsolver outputs.
SuiteResult lipschitz_suite(int probes, std::uint64_t seed);
/// Rockafellar-style membership implies value-gap membership.
SuiteResult rockafellar_suite(int probes, std::uint64_t seed);
/// Inexact prox with gradient error e lies in the inflated prox set of the true gradient.
SuiteResult gradient_error_suite(int probes, std::uint64_t seed);
/// Gap bounds, inner monotonicity and the diagonal closed form.
SuiteResult subsolver_suite(int instances, std::uint64_t seed);
/// Sufficient-decrease and recurrence slacks along tall runs.
SuiteResult diagnostics_suite(Index N, Index cycles, std::uint64_t seed);
/// Worst-case simulator against both lemma bounds over the standard grid.
SuiteResult theory_grid_suite(const std::optional<std::filesystem::path>& out_dir);

VerifyReport run_verification(const VerifyOptions& options);

}  // namespace icbpg

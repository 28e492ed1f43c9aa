#pragma once

// Inexact cyclic block proximal gradient: outer cycles over the blocks, each
// block update being an inexact prox step at tolerance delta_{k+1}.

#include <iosfwd>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "icbpg/problem.hpp"

namespace icbpg {

class ToleranceSchedule {
 public:
  enum class Kind { Fixed, InverseSquare, Custom };

  static ToleranceSchedule fixed(double delta);
  /// delta_k = d_tilde / k^2.
  static ToleranceSchedule inverse_square(double d_tilde);
  /// delta_1, delta_2, ...; the last entry repeats past the end.
  static ToleranceSchedule custom(std::vector<double> values);
  /// "fixed:1e-4" or "inv2:1".
  static ToleranceSchedule parse(std::string_view text);

  Kind kind() const { return kind_; }
  double parameter() const { return value_; }
  const std::vector<double>& values() const { return values_; }
  /// Tolerance for cycle index k >= 1.
  double at(Index k) const;
  std::string label() const;

 private:
  Kind kind_ = Kind::Fixed;
  double value_ = 0.0;
  std::vector<double> values_;
};

double delta_at(const ToleranceSchedule& schedule, Index k);

struct StoppingRule {
  /// Stop once F(x^k) - F* <= target_gap (requires f_star).
  std::optional<double> target_gap;
  std::optional<double> f_star;
  Index max_cycles = 1000;
  /// Stop once |F(x^k) - F(x^{k+1})| <= relative_change * (1 + |F(x^k)|).
  std::optional<double> relative_change;
};

struct SolverConfig {
  ToleranceSchedule schedule = ToleranceSchedule::inverse_square(1.0);
  StoppingRule stopping;
  bool diagnostics = false;
  long max_inner = 100000;
  bool deterministic = true;
  /// Full residual recomputation period, in cycles.
  int residual_refresh = 50;
  /// R(x^0) surrogate for the recurrence diagnostic.
  std::optional<double> r_surrogate;
  /// Stop with an error if a zero-tolerance subproblem does not converge.
  bool abort_on_exact_failure = true;
};

struct CycleRecord {
  Index k = 0;
  double F_value = 0.0;
  double delta_k = 0.0;
  double cpu_cycle_s = 0.0;
  double cpu_total_s = 0.0;
  std::vector<long> inner_iterations;
  long inner_total = 0;
  int mondec_violations = 0;
  int unconverged_blocks = 0;
  /// Diagnostics (filled when enabled; row 0 carries none).
  std::vector<double> block_decrease_slack;
  std::optional<double> full_decrease_slack;
  std::optional<double> recurrence_slack;
  double step_B_norm = 0.0;
};

enum class Termination { TargetGap, MaxCycles, RelativeChange };
std::string to_string(Termination t);

struct RunRecord {
  SolverConfig config;
  /// Row 0 is x^0; row k >= 1 is the state after cycle k with the tolerance used for it.
  std::vector<CycleRecord> cycles;
  Vector x;
  Termination termination = Termination::MaxCycles;
  /// Set when diagnostics used F* and a surrogate R.
  bool recurrence_under_surrogate = false;

  Index total_cycles() const { return cycles.empty() ? 0 : static_cast<Index>(cycles.size()) - 1; }
  double total_cpu() const { return cycles.empty() ? 0.0 : cycles.back().cpu_total_s; }
};

RunRecord run(const CompositeProblem& problem, const Vector& x0, const SolverConfig& config);

/// 3 L_i delta + F(x^{k,i-1}) - F(x^{k,i}) - (L_i/4) ||step||_(i)^2.
double check_sufficient_decrease_block(double F_prev, double F_new, double step_norm, double L_i,
                                       double delta);
/// 3 L_min p delta + F(x^k) - F(x^{k+1}) - (L_min/4) ||x^k - x^{k+1}||_B^2.
double check_sufficient_decrease_full(double F_k, double F_k1, double step_B_norm, double L_min,
                                      Index p, double delta);

struct RecurrenceConstants {
  double l_min = 1.0;
  double l_max = 1.0;
  double l_f = 1.0;
  Index p = 1;
  double delta_1 = 0.0;
};

/// L_min [3p + (L_max^2/4) ((R sqrt2 + sqrt(p delta_1)) / ((L_f + L_max) R))^2].
double delta_coefficient(const RecurrenceConstants& c, double R);

/// RHS - LHS of
///   (L_min / (8 p (L_f+L_max)^2 R^2)) (F_{k+1} - F*)^2 <= F_k - F_{k+1} + coef * delta_{k+1}.
double check_recurrence(double F_k, double F_k1, double F_star, double R,
                        const RecurrenceConstants& constants, double delta_k1);

/// Columns: cycle, delta_k, F_value, gap_to_ref, cpu_cycle_s, cpu_total_s,
/// inner_iters_total, mondec_violations. gap_to_ref is empty without F*.
void write_trace_csv(const RunRecord& record, std::ostream& out,
                     std::optional<double> f_star = std::nullopt, bool include_cpu = true);

}  // namespace icbpg

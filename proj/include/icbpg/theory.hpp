#pragma once

// Rate bounds for the inexact cyclic method and a worst-case simulator for the
// recurrence (1/gamma) A_{l+1}^2 <= A_l - A_{l+1} + Delta_{l+1}.

#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "icbpg/kernels.hpp"
#include "icbpg/types.hpp"

namespace icbpg::theory {

/// Problem-level constants entering the rate formulas.
struct ProblemConstants {
  Index p = 1;
  double l_min = 1.0;
  double l_max = 1.0;
  double l_f = 1.0;
  /// Distance from x^0 to the solution set (or its surrogate).
  double R = 1.0;
};

struct RateConstants {
  double gamma = 0.0;
  double u = 0.0;
  double D = 0.0;
  double D_tilde = 0.0;
  double A0 = 0.0;
};

/// 8 p (L_f + L_max)^2 R^2 / L_min.
double gamma_of(const ProblemConstants& c);
/// L_min [3p + (L_max^2/4) ((R sqrt2 + sqrt(p delta)) / ((L_f + L_max) R))^2].
double bracket(const ProblemConstants& c, double delta);

RateConstants fixed_constants(const ProblemConstants& c, double delta, double F0_gap);
RateConstants decreasing_constants(const ProblemConstants& c, double D_tilde, double delta_1,
                                   double F0_gap);

/// A_0..A_K with A_{l+1} = min(A_l, positive root of t^2/gamma + t - (A_l + Delta_{l+1})).
/// `deltas[l-1]` is Delta_l. Warns on stderr when gamma < 1.
std::vector<double> simulate_worst_case(double gamma, std::span<const double> deltas, double A0,
                                        Index K);

double lemma_bound_fixed(double gamma, double Delta, double A0, Index k);
double lemma_bound_decreasing(double gamma, double D, double A0, Index k);

double theorem_fixed_bound(const ProblemConstants& c, double delta, double F0_gap, Index k);
/// Throws std::domain_error when eps <= u. Never below 2, the first index the bound covers.
Index corollary_fixed_K(const ProblemConstants& c, double delta, double F0_gap, double eps);
double theorem_decreasing_bound(const ProblemConstants& c, double D_tilde, double delta_1,
                                double F0_gap, Index k);
Index corollary_decreasing_K(const ProblemConstants& c, double D_tilde, double delta_1,
                             double F0_gap, double eps);

/// Step classification over l = 0..k-1: geometric steps have A_{l+1}/A_l <= 1/2;
/// slow steps are split by Delta_{l+1}/(A_l A_{l+1}) against 1/(4 gamma).
struct CaseCounts {
  Index geometric = 0;
  Index slow_small = 0;
  Index slow_large = 0;
  /// Steps with A_l = 0, where the ratio is undefined.
  Index degenerate = 0;

  Index slow() const { return slow_small + slow_large; }
  std::string str() const;
};

CaseCounts classify_cases(std::span<const double> A, std::span<const double> deltas, double gamma,
                          Index k);

enum class SweepMode { Fixed, Decreasing };

struct GridCell {
  SweepMode mode = SweepMode::Fixed;
  double gamma = 0.0;
  double delta_or_D = 0.0;
  double A0 = 0.0;
  /// Index with the smallest margin over the horizon.
  Index k = 0;
  double A_k = 0.0;
  double bound = 0.0;
  double margin = 0.0;
  /// Cells where the bound is not below A0 at the worst index.
  bool vacuous = false;
  CaseCounts cases;
};

struct GridSpec {
  std::vector<double> gammas{1.0, 10.0, 100.0};
  std::vector<double> deltas{0.0, 1e-4, 1e-2};
  std::vector<double> A0s{0.1, 1.0, 10.0};
  Index horizon = 10000;
};

std::vector<GridCell> lemma_grid_sweep(SweepMode mode, const GridSpec& spec,
                                       kernels::Execution e = kernels::Execution::Parallel);

/// Columns: gamma, Delta_or_D, A0, k, A_k, bound, margin, case_counts.
void write_grid_csv(const std::vector<GridCell>& cells, std::ostream& out);

}  // namespace icbpg::theory

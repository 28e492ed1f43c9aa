#include "icbpg/theory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace icbpg::theory {

double gamma_of(const ProblemConstants& c) {
  if (!(c.l_min > 0.0)) throw std::invalid_argument("L_min must be positive");
  const double s = c.l_f + c.l_max;
  return 8.0 * static_cast<double>(c.p) * s * s * c.R * c.R / c.l_min;
}

double bracket(const ProblemConstants& c, double delta) {
  if (!(c.R > 0.0)) throw std::invalid_argument("R must be positive");
  const double p = static_cast<double>(c.p);
  const double ratio = (c.R * std::numbers::sqrt2 + std::sqrt(p * delta)) / ((c.l_f + c.l_max) * c.R);
  return c.l_min * (3.0 * p + 0.25 * c.l_max * c.l_max * ratio * ratio);
}

RateConstants fixed_constants(const ProblemConstants& c, double delta, double F0_gap) {
  RateConstants rc;
  rc.gamma = gamma_of(c);
  rc.u = std::sqrt(bracket(c, delta) * delta * rc.gamma);
  rc.A0 = F0_gap;
  return rc;
}

RateConstants decreasing_constants(const ProblemConstants& c, double D_tilde, double delta_1,
                                   double F0_gap) {
  RateConstants rc;
  rc.gamma = gamma_of(c);
  rc.D_tilde = D_tilde;
  rc.D = D_tilde * bracket(c, delta_1);
  rc.A0 = F0_gap;
  return rc;
}

std::vector<double> simulate_worst_case(double gamma, std::span<const double> deltas, double A0,
                                        Index K) {
  if (!(gamma > 0.0)) throw std::invalid_argument("gamma must be positive");
  if (A0 < 0.0) throw std::invalid_argument("A0 must be non-negative");
  if (static_cast<Index>(deltas.size()) < K) throw std::invalid_argument("need Delta_1..Delta_K");
  for (std::size_t l = 0; l < deltas.size(); ++l) {
    if (deltas[l] < 0.0 || (l > 0 && deltas[l] > deltas[l - 1])) {
      throw std::invalid_argument("Delta sequence must be non-negative and non-increasing");
    }
  }
  if (gamma < 1.0) {
    std::cerr << "warning: gamma = " << gamma << " < 1, recurrence bounds are informational\n";
  }
  std::vector<double> A(static_cast<std::size_t>(K) + 1);
  A[0] = A0;
  for (Index l = 0; l < K; ++l) {
    const double c = A[static_cast<std::size_t>(l)] + deltas[static_cast<std::size_t>(l)];
    // Positive root of t^2/gamma + t - c = 0 in cancellation-free form.
    const double root = 2.0 * c / (1.0 + std::sqrt(1.0 + 4.0 * c / gamma));
    A[static_cast<std::size_t>(l) + 1] = std::min(A[static_cast<std::size_t>(l)], root);
  }
  return A;
}

double lemma_bound_fixed(double gamma, double Delta, double A0, Index k) {
  if (k < 2) throw std::invalid_argument("fixed-error bound needs k >= 2");
  const double u = std::sqrt(Delta * gamma);
  const double km1 = static_cast<double>(k - 1);
  const double geometric = std::pow(0.5, km1 / 2.0) * A0;
  const double denom = km1 * (A0 + 3.0 * u);
  const double slow = denom > 0.0 ? 4.0 * gamma * (A0 - u) / denom + u : u;
  return std::max(slow, geometric);
}

double lemma_bound_decreasing(double gamma, double D, double A0, Index k) {
  if (k < 4) throw std::invalid_argument("decreasing-error bound needs k >= 4");
  const double km3 = static_cast<double>(k - 3);
  return std::max({16.0 * gamma / km3, 8.0 * std::sqrt(D * gamma) / km3,
                   std::pow(0.5, static_cast<double>(k - 1) / 2.0) * A0});
}

double theorem_fixed_bound(const ProblemConstants& c, double delta, double F0_gap, Index k) {
  return lemma_bound_fixed(gamma_of(c), bracket(c, delta) * delta, F0_gap, k);
}

Index corollary_fixed_K(const ProblemConstants& c, double delta, double F0_gap, double eps) {
  const RateConstants rc = fixed_constants(c, delta, F0_gap);
  if (!(eps > rc.u)) throw std::domain_error("target below error floor");
  const double a = 2.0 / std::numbers::ln2 * std::log(F0_gap / eps);
  const double b = 4.0 * rc.gamma * (F0_gap - rc.u) / ((eps - rc.u) * (F0_gap + 3.0 * rc.u));
  return std::max<Index>(2, 1 + static_cast<Index>(std::ceil(std::max(a, b))));
}

double theorem_decreasing_bound(const ProblemConstants& c, double D_tilde, double delta_1,
                                double F0_gap, Index k) {
  const RateConstants rc = decreasing_constants(c, D_tilde, delta_1, F0_gap);
  return lemma_bound_decreasing(rc.gamma, rc.D, F0_gap, k);
}

Index corollary_decreasing_K(const ProblemConstants& c, double D_tilde, double delta_1,
                             double F0_gap, double eps) {
  if (!(eps > 0.0)) throw std::invalid_argument("eps must be positive");
  const RateConstants rc = decreasing_constants(c, D_tilde, delta_1, F0_gap);
  const double a = 1.0 + 2.0 / std::numbers::ln2 * std::log(F0_gap / eps);
  const double b = 3.0 + 16.0 * rc.gamma / eps;
  const double d = 3.0 + 8.0 * std::sqrt(rc.D * rc.gamma) / eps;
  return static_cast<Index>(std::ceil(std::max({a, b, d})));
}

std::string CaseCounts::str() const {
  return "geometric=" + std::to_string(geometric) + ";slow_small=" + std::to_string(slow_small) +
         ";slow_large=" + std::to_string(slow_large) + ";degenerate=" + std::to_string(degenerate);
}

CaseCounts classify_cases(std::span<const double> A, std::span<const double> deltas, double gamma,
                          Index k) {
  if (static_cast<Index>(A.size()) < k + 1 || static_cast<Index>(deltas.size()) < k) {
    throw std::invalid_argument("sequence shorter than the classification horizon");
  }
  CaseCounts c;
  const double threshold = 1.0 / (4.0 * gamma);
  for (Index l = 0; l < k; ++l) {
    const double a = A[static_cast<std::size_t>(l)];
    const double b = A[static_cast<std::size_t>(l) + 1];
    if (a <= 0.0) {
      ++c.degenerate;
      continue;
    }
    if (b / a <= 0.5) {
      ++c.geometric;
    } else if (b > 0.0 && deltas[static_cast<std::size_t>(l)] / (a * b) >= threshold) {
      ++c.slow_large;
    } else {
      ++c.slow_small;
    }
  }
  return c;
}

namespace {

GridCell sweep_cell(SweepMode mode, double gamma, double dd, double A0, Index K) {
  std::vector<double> deltas(static_cast<std::size_t>(K));
  for (Index l = 1; l <= K; ++l) {
    const double ll = static_cast<double>(l);
    deltas[static_cast<std::size_t>(l - 1)] = mode == SweepMode::Fixed ? dd : dd / (ll * ll);
  }
  const std::vector<double> A = simulate_worst_case(gamma, deltas, A0, K);
  GridCell cell;
  cell.mode = mode;
  cell.gamma = gamma;
  cell.delta_or_D = dd;
  cell.A0 = A0;
  cell.margin = std::numeric_limits<double>::infinity();
  const Index k0 = mode == SweepMode::Fixed ? 2 : 4;
  for (Index k = k0; k <= K; ++k) {
    const double bound = mode == SweepMode::Fixed ? lemma_bound_fixed(gamma, dd, A0, k)
                                                  : lemma_bound_decreasing(gamma, dd, A0, k);
    const double margin = bound - A[static_cast<std::size_t>(k)];
    if (margin < cell.margin) {
      cell.margin = margin;
      cell.k = k;
      cell.A_k = A[static_cast<std::size_t>(k)];
      cell.bound = bound;
    }
  }
  cell.vacuous = cell.bound >= A0;
  cell.cases = classify_cases(A, deltas, gamma, K);
  return cell;
}

}  // namespace

std::vector<GridCell> lemma_grid_sweep(SweepMode mode, const GridSpec& spec, kernels::Execution e) {
  struct Key {
    double g, d, a;
  };
  std::vector<Key> keys;
  for (double g : spec.gammas)
    for (double d : spec.deltas)
      for (double a : spec.A0s) keys.push_back({g, d, a});
  std::vector<GridCell> cells(keys.size());
  const auto n = static_cast<std::ptrdiff_t>(keys.size());
  if (e == kernels::Execution::Parallel) {
#pragma omp parallel for schedule(dynamic)
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      const Key& kk = keys[static_cast<std::size_t>(j)];
      cells[static_cast<std::size_t>(j)] = sweep_cell(mode, kk.g, kk.d, kk.a, spec.horizon);
    }
  } else {
    for (std::ptrdiff_t j = 0; j < n; ++j) {
      const Key& kk = keys[static_cast<std::size_t>(j)];
      cells[static_cast<std::size_t>(j)] = sweep_cell(mode, kk.g, kk.d, kk.a, spec.horizon);
    }
  }
  return cells;
}

void write_grid_csv(const std::vector<GridCell>& cells, std::ostream& out) {
  out << "gamma,Delta_or_D,A0,k,A_k,bound,margin,case_counts\n";
  char buf[256];
  for (const GridCell& c : cells) {
    std::snprintf(buf, sizeof buf, "%.17g,%.17g,%.17g,%lld,%.17g,%.17g,%.17g,", c.gamma,
                  c.delta_or_D, c.A0, static_cast<long long>(c.k), c.A_k, c.bound, c.margin);
    out << buf << c.cases.str() << '\n';
  }
}

}  // namespace icbpg::theory

#include "icbpg/solver.hpp"

#include <cmath>
#include <cstdio>
#include <ostream>
#include <stdexcept>
#include <string>

#include "icbpg/cpu_timer.hpp"
#include "icbpg/prox.hpp"
#include "icbpg/subsolver.hpp"

namespace icbpg {

namespace k = kernels;

// ---------------------------------------------------------------- schedules

ToleranceSchedule ToleranceSchedule::fixed(double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
  ToleranceSchedule s;
  s.kind_ = Kind::Fixed;
  s.value_ = delta;
  return s;
}

ToleranceSchedule ToleranceSchedule::inverse_square(double d_tilde) {
  if (!(d_tilde >= 0.0)) throw std::invalid_argument("schedule constant must be non-negative");
  ToleranceSchedule s;
  s.kind_ = Kind::InverseSquare;
  s.value_ = d_tilde;
  return s;
}

ToleranceSchedule ToleranceSchedule::custom(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("custom schedule needs at least one value");
  for (std::size_t j = 0; j < values.size(); ++j) {
    if (!(values[j] >= 0.0)) throw std::invalid_argument("tolerances must be non-negative");
    if (j > 0 && values[j] > values[j - 1]) {
      throw std::invalid_argument("tolerance schedule must be non-increasing");
    }
  }
  ToleranceSchedule s;
  s.kind_ = Kind::Custom;
  s.values_ = std::move(values);
  return s;
}

ToleranceSchedule ToleranceSchedule::parse(std::string_view text) {
  const auto colon = text.find(':');
  if (colon == std::string_view::npos) {
    throw std::invalid_argument("schedule must look like inv2:D or fixed:DELTA");
  }
  const std::string kind(text.substr(0, colon));
  const std::string arg(text.substr(colon + 1));
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(arg, &used);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used != arg.size() || arg.empty()) throw std::invalid_argument("bad schedule value: " + arg);
  if (kind == "inv2") return inverse_square(v);
  if (kind == "fixed") return fixed(v);
  throw std::invalid_argument("unknown schedule kind: " + kind);
}

double ToleranceSchedule::at(Index k) const {
  if (k < 1) throw std::out_of_range("tolerance schedules are indexed from k = 1");
  switch (kind_) {
    case Kind::Fixed:
      return value_;
    case Kind::InverseSquare: {
      const double kk = static_cast<double>(k);
      return value_ / (kk * kk);
    }
    case Kind::Custom:
      return values_[static_cast<std::size_t>(std::min<Index>(k, static_cast<Index>(values_.size())) - 1)];
  }
  return 0.0;
}

std::string ToleranceSchedule::label() const {
  char buf[64];
  switch (kind_) {
    case Kind::Fixed:
      std::snprintf(buf, sizeof buf, "fixed:%g", value_);
      return buf;
    case Kind::InverseSquare:
      std::snprintf(buf, sizeof buf, "inv2:%g", value_);
      return buf;
    case Kind::Custom:
      return "custom";
  }
  return "unknown";
}

double delta_at(const ToleranceSchedule& schedule, Index k) { return schedule.at(k); }

std::string to_string(Termination t) {
  switch (t) {
    case Termination::TargetGap:
      return "target_gap";
    case Termination::MaxCycles:
      return "max_cycles";
    case Termination::RelativeChange:
      return "relative_change";
  }
  return "unknown";
}

// ---------------------------------------------------------------- diagnostics

double check_sufficient_decrease_block(double F_prev, double F_new, double step_norm, double L_i,
                                       double delta) {
  return 3.0 * L_i * delta + F_prev - F_new - 0.25 * L_i * step_norm * step_norm;
}

double check_sufficient_decrease_full(double F_k, double F_k1, double step_B_norm, double L_min,
                                      Index p, double delta) {
  return 3.0 * L_min * static_cast<double>(p) * delta + F_k - F_k1 -
         0.25 * L_min * step_B_norm * step_B_norm;
}

double delta_coefficient(const RecurrenceConstants& c, double R) {
  if (!(R > 0.0)) throw std::invalid_argument("R surrogate must be positive");
  const double p = static_cast<double>(c.p);
  const double ratio = (R * std::sqrt(2.0) + std::sqrt(p * c.delta_1)) / ((c.l_f + c.l_max) * R);
  return c.l_min * (3.0 * p + 0.25 * c.l_max * c.l_max * ratio * ratio);
}

double check_recurrence(double F_k, double F_k1, double F_star, double R,
                        const RecurrenceConstants& c, double delta_k1) {
  if (!(R > 0.0)) throw std::invalid_argument("R surrogate must be positive");
  const double p = static_cast<double>(c.p);
  const double s = c.l_f + c.l_max;
  const double coef = c.l_min / (8.0 * p * s * s * R * R);
  const double gap = F_k1 - F_star;
  const double lhs = coef * gap * gap;
  const double rhs = F_k - F_k1 + delta_coefficient(c, R) * delta_k1;
  return rhs - lhs;
}

// ---------------------------------------------------------------- run

RunRecord run(const CompositeProblem& problem, const Vector& x0, const SolverConfig& config) {
  require_size(x0.size(), problem.dimension(), "initial point");
  const auto& part = problem.partition();
  const auto& smooth = problem.smooth();
  const Index p = problem.blocks();
  const bool gram = problem.family() == MetricFamily::Gram;
  const StoppingRule& stop = config.stopping;
  if (stop.target_gap && !stop.f_star) throw std::invalid_argument("target gap needs F*");
  if (stop.max_cycles < 0) throw std::invalid_argument("max_cycles must be non-negative");

  RunRecord rec;
  rec.config = config;
  Vector x = x0;
  Vector r = smooth.residual(x);
  std::vector<double> reg(static_cast<std::size_t>(p));
  for (Index i = 0; i < p; ++i) {
    reg[static_cast<std::size_t>(i)] = problem.lambda(i) * part.segment(x, i).lpNorm<1>();
  }
  auto reg_total = [&] {
    double s = 0.0;
    for (double v : reg) s += v;
    return s;
  };

  std::vector<double> curvature(static_cast<std::size_t>(p), 0.0);
  if (gram) {
    for (Index i = 0; i < p; ++i) curvature[static_cast<std::size_t>(i)] = lifted_curvature(problem.block_columns(i));
  }

  const bool with_recurrence = config.diagnostics && stop.f_star && config.r_surrogate;
  rec.recurrence_under_surrogate = with_recurrence;
  RecurrenceConstants rc{problem.l_min(), problem.l_max(), problem.l_f(), p, config.schedule.at(1)};

  CycleRecord row0;
  row0.F_value = full_objective(problem, x);
  rec.cycles.push_back(row0);
  double cpu_total = 0.0;

  auto reached_target = [&](double F) { return stop.target_gap && F - *stop.f_star <= *stop.target_gap; };
  if (reached_target(row0.F_value)) {
    rec.termination = Termination::TargetGap;
    rec.x = x;
    return rec;
  }

  SubsolverOptions sopts;
  sopts.max_inner = config.max_inner;
  Vector delta_y;
  for (Index kc = 0; kc < stop.max_cycles; ++kc) {
    const double delta = config.schedule.at(kc + 1);
    CycleRecord row;
    row.k = kc + 1;
    row.delta_k = delta;
    row.inner_iterations.assign(static_cast<std::size_t>(p), 0);
    const double F_k = rec.cycles.back().F_value;
    double step_sq = 0.0;
    double cpu_cycle = 0.0;

    for (Index i = 0; i < p; ++i) {
      const std::size_t ui = static_cast<std::size_t>(i);
      const double F_prev = config.diagnostics ? 0.5 * r.squaredNorm() + reg_total() : 0.0;
      const double t0 = thread_cpu_seconds();
      const k::ColumnRange cols = problem.block_columns(i);
      const Vector xi = part.segment(x, i);
      Vector y;
      if (gram) {
        SubproblemOptions bopts;
        bopts.curvature = curvature[ui];
        const LassoSubproblem sub = build_subproblem(problem, x, r, i, bopts);
        const SubsolverResult res =
            box_gp_solve(sub, xi, delta, DecreaseGuard::monotone(sub.smooth_value(xi)), sopts);
        if (!res.converged) {
          if (delta == 0.0 && config.abort_on_exact_failure) {
            throw std::runtime_error("cycle " + std::to_string(kc + 1) + ", block " +
                                     std::to_string(i) +
                                     ": subproblem did not reach machine-precision gap (gap " +
                                     std::to_string(res.duality_gap) + ")");
          }
          ++row.unconverged_blocks;
        }
        if (!res.f_decrease_satisfied) ++row.mondec_violations;
        row.inner_iterations[ui] = res.inner_iterations;
        y = res.y;
        delta_y = y - xi;
        k::serial::scatter_add(cols, k::view(delta_y), k::view(r));
      } else {
        Vector g(cols.cols());
        k::serial::gather(cols, k::view(r), k::view(g));
        y = exact_prox_l1(xi, g, problem.lambda(i), problem.lipschitz(i));
        delta_y = y - xi;
        const double f_old = 0.5 * r.squaredNorm();
        k::serial::scatter_add(cols, k::view(delta_y), k::view(r));
        if (0.5 * r.squaredNorm() > f_old) ++row.mondec_violations;
      }
      part.segment(x, i) = y;
      reg[ui] = problem.lambda(i) * y.lpNorm<1>();
      cpu_cycle += thread_cpu_seconds() - t0;

      if (config.diagnostics) {
        const double F_new = 0.5 * r.squaredNorm() + reg_total();
        const double step = problem.metric(i).norm(delta_y);
        step_sq += step * step;
        row.block_decrease_slack.push_back(
            check_sufficient_decrease_block(F_prev, F_new, step, problem.lipschitz(i), delta));
      }
    }
    if (config.residual_refresh > 0 && (kc + 1) % config.residual_refresh == 0) {
      const double t0 = thread_cpu_seconds();
      r = smooth.residual(x);
      cpu_cycle += thread_cpu_seconds() - t0;
    }

    row.F_value = full_objective(problem, x);
    for (long n : row.inner_iterations) row.inner_total += n;
    cpu_total += cpu_cycle;
    row.cpu_cycle_s = cpu_cycle;
    row.cpu_total_s = cpu_total;
    if (config.diagnostics) {
      row.step_B_norm = std::sqrt(step_sq);
      row.full_decrease_slack =
          check_sufficient_decrease_full(F_k, row.F_value, row.step_B_norm, problem.l_min(), p, delta);
      if (with_recurrence) {
        row.recurrence_slack =
            check_recurrence(F_k, row.F_value, *stop.f_star, *config.r_surrogate, rc, delta);
      }
    }
    rec.cycles.push_back(std::move(row));

    const double F_k1 = rec.cycles.back().F_value;
    if (reached_target(F_k1)) {
      rec.termination = Termination::TargetGap;
      break;
    }
    if (stop.relative_change && std::abs(F_k - F_k1) <= *stop.relative_change * (1.0 + std::abs(F_k))) {
      rec.termination = Termination::RelativeChange;
      break;
    }
  }
  rec.x = std::move(x);
  return rec;
}

void write_trace_csv(const RunRecord& record, std::ostream& out, std::optional<double> f_star,
                     bool include_cpu) {
  out << "cycle,delta_k,F_value,gap_to_ref";
  if (include_cpu) out << ",cpu_cycle_s,cpu_total_s";
  out << ",inner_iters_total,mondec_violations\n";
  char buf[64];
  auto num = [&](double v) {
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return std::string(buf);
  };
  for (const CycleRecord& c : record.cycles) {
    out << c.k << ',' << num(c.delta_k) << ',' << num(c.F_value) << ',';
    if (f_star) out << num(c.F_value - *f_star);
    if (include_cpu) out << ',' << num(c.cpu_cycle_s) << ',' << num(c.cpu_total_s);
    out << ',' << c.inner_total << ',' << c.mondec_violations << '\n';
  }
}

}  // namespace icbpg

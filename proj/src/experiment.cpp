#include "icbpg/experiment.hpp"

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <stdexcept>

namespace icbpg {

namespace fs = std::filesystem;

double global_duality_gap(const CompositeProblem& problem, const Vector& x) {
  const Vector r = problem.smooth().residual(x);
  const Vector corr = problem.smooth().matrix().transpose() * r;
  double s = 1.0;
  for (Index i = 0; i < problem.blocks(); ++i) {
    const double m = problem.partition().segment(corr, i).lpNorm<Eigen::Infinity>();
    if (m > problem.lambda(i)) s = std::min(s, problem.lambda(i) / m);
  }
  const double primal = 0.5 * r.squaredNorm() + regularizer_value(problem, x);
  const double dual = -0.5 * s * s * r.squaredNorm() - s * r.dot(problem.smooth().rhs());
  return std::max(0.0, primal - dual);
}

namespace {

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.3e", v);
  return buf;
}

}  // namespace

Calibration calibrate(const CompositeProblem& problem, const CalibrateOptions& options) {
  if (options.check_every <= 0) throw std::invalid_argument("check_every must be positive");
  SolverConfig cfg;
  cfg.schedule = ToleranceSchedule::fixed(0.0);
  Vector x = Vector::Zero(problem.dimension());
  Calibration c;
  while (true) {
    const double F = full_objective(problem, x);
    c.duality_gap = global_duality_gap(problem, x);
    if (c.duality_gap <= options.gap_tolerance * (1.0 + std::abs(F))) break;
    if (c.cycles >= options.budget) {
      throw std::runtime_error("calibration did not converge within " + std::to_string(options.budget) +
                               " cycles (duality gap " + sci(c.duality_gap) + ")");
    }
    cfg.stopping.max_cycles = std::min(options.check_every, options.budget - c.cycles);
    const RunRecord rec = run(problem, x, cfg);
    c.cycles += rec.total_cycles();
    // Every block already meets its zero tolerance at the warm start.
    if ((rec.x.array() == x.array()).all()) {
      if (c.duality_gap <= options.stall_tolerance * (1.0 + std::abs(F))) break;
      throw std::runtime_error("calibration stalled at duality gap " + sci(c.duality_gap));
    }
    x = rec.x;
  }
  c.f_star = full_objective(problem, x);
  c.r_surrogate = global_B_norm(problem, x);
  c.x_hat = std::move(x);
  return c;
}

void store_calibration(const Calibration& c, Dataset& d, const fs::path& dir) {
  io::write_vector(c.x_hat, dir / "x_hat.txt");
  d.manifest.set("f_star", c.f_star);
  d.manifest.set("r_surrogate", c.r_surrogate);
  d.manifest.set("calibration_cycles", static_cast<long long>(c.cycles));
  d.manifest.set("calibration_duality_gap", c.duality_gap);
  d.manifest.write(dir / "manifest.txt");
}

Calibration load_calibration(const Dataset& d, const fs::path& dir) {
  if (!d.manifest.has("f_star") || !fs::exists(dir / "x_hat.txt")) {
    throw std::runtime_error("dataset in " + dir.string() + " is not calibrated; run 'calibrate' first");
  }
  Calibration c;
  c.f_star = d.manifest.get_double("f_star");
  c.r_surrogate = d.manifest.get_double("r_surrogate");
  c.cycles = d.manifest.get_int("calibration_cycles");
  c.duality_gap = d.manifest.get_double("calibration_duality_gap");
  c.x_hat = io::read_vector(dir / "x_hat.txt");
  require_size(c.x_hat.size(), d.A.cols(), "calibrated solution");
  return c;
}

ExperimentPlan ExperimentPlan::standard(double f_star) {
  ExperimentPlan plan;
  plan.schedules = {ToleranceSchedule::inverse_square(1.0), ToleranceSchedule::fixed(1e-4),
                    ToleranceSchedule::fixed(1e-6), ToleranceSchedule::fixed(1e-8)};
  plan.eps = 1e-6 * (1.0 + std::abs(f_star));
  return plan;
}

int threads_from_env() {
  const char* v = std::getenv("ICBPG_THREADS");
  if (v == nullptr || *v == '\0') return 1;
  const int t = std::atoi(v);
  if (t <= 0) throw std::invalid_argument("ICBPG_THREADS must be a positive integer");
  return t;
}

ExperimentReport run_experiment(const CompositeProblem& problem, const Calibration& calibration,
                                const ExperimentPlan& plan, int threads) {
  if (plan.schedules.empty()) throw std::invalid_argument("experiment plan has no schedules");
  if (plan.repetitions <= 0) throw std::invalid_argument("repetitions must be positive");
  const std::size_t ns = plan.schedules.size();
  const std::size_t reps = static_cast<std::size_t>(plan.repetitions);
  std::vector<RunRecord> records(ns * reps);
  const Vector x0 = Vector::Zero(problem.dimension());

  const auto jobs = static_cast<std::ptrdiff_t>(records.size());
#pragma omp parallel for schedule(dynamic) num_threads(std::max(1, threads))
  for (std::ptrdiff_t j = 0; j < jobs; ++j) {
    SolverConfig cfg;
    cfg.schedule = plan.schedules[static_cast<std::size_t>(j) / reps];
    cfg.stopping.f_star = calibration.f_star;
    cfg.stopping.target_gap = plan.eps;
    cfg.stopping.max_cycles = plan.max_cycles;
    records[static_cast<std::size_t>(j)] = run(problem, x0, cfg);
  }

  ExperimentReport report;
  report.f_star = calibration.f_star;
  report.eps = plan.eps;
  for (std::size_t s = 0; s < ns; ++s) {
    std::vector<std::size_t> idx(reps);
    std::iota(idx.begin(), idx.end(), s * reps);
    std::sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) {
      return records[a].total_cpu() < records[b].total_cpu();
    });
    ScheduleOutcome o;
    o.label = plan.schedules[s].label();
    for (std::size_t r = 0; r < reps; ++r) o.repetition_cpu.push_back(records[s * reps + r].total_cpu());
    o.record = std::move(records[idx[reps / 2]]);
    o.final_gap = o.record.cycles.back().F_value - calibration.f_star;
    o.converged = o.record.termination == Termination::TargetGap;
    report.outcomes.push_back(std::move(o));
  }
  return report;
}

std::string file_label(const std::string& schedule_label) {
  std::string s = schedule_label;
  std::replace(s.begin(), s.end(), ':', '_');
  return s;
}

namespace {

std::ofstream open_csv(const fs::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

const char* kPlotScript = R"PY(#!/usr/bin/env python3
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt


def load(path, xkey):
    series = defaultdict(lambda: ([], []))
    with open(path) as f:
        for row in csv.DictReader(f):
            gap = float(row["gap"])
            if gap <= 0:
                continue
            xs, ys = series[row["schedule"]]
            xs.append(float(row[xkey]))
            ys.append(gap)
    return series


def plot(path, xkey, xlabel, out):
    fig, ax = plt.subplots(figsize=(6, 4))
    for name, (xs, ys) in load(path, xkey).items():
        ax.plot(xs, ys, label=name)
    ax.set_yscale("log")
    ax.set_xlabel(xlabel)
    ax.set_ylabel("F(x^k) - F*")
    ax.legend()
    fig.tight_layout()
    fig.savefig(out, dpi=150)


if __name__ == "__main__":
    plot("plot_gap_vs_cpu.csv", "cpu_total_s", "CPU time (s)", "gap_vs_cpu.png")
    plot("plot_gap_vs_cycles.csv", "cycle", "cycle", "gap_vs_cycles.png")
    sys.exit(0)
)PY";

}  // namespace

void write_report(const ExperimentReport& report, const fs::path& out) {
  fs::create_directories(out);
  char buf[256];
  auto summary = open_csv(out / "summary.csv");
  summary << "schedule,total_cycles,total_cpu_s,cpu_per_cycle_mean,final_gap,converged\n";
  auto vs_cpu = open_csv(out / "plot_gap_vs_cpu.csv");
  vs_cpu << "schedule,cpu_total_s,gap\n";
  auto vs_cycles = open_csv(out / "plot_gap_vs_cycles.csv");
  vs_cycles << "schedule,cycle,gap\n";

  for (const ScheduleOutcome& o : report.outcomes) {
    auto trace = open_csv(out / ("trace_" + file_label(o.label) + ".csv"));
    write_trace_csv(o.record, trace, report.f_star);
    const Index cycles = o.record.total_cycles();
    const double cpu = o.record.total_cpu();
    std::snprintf(buf, sizeof buf, "%s,%lld,%.17g,%.17g,%.17g,%d\n", o.label.c_str(),
                  static_cast<long long>(cycles), cpu, cycles > 0 ? cpu / static_cast<double>(cycles) : 0.0,
                  o.final_gap, o.converged ? 1 : 0);
    summary << buf;
    for (const CycleRecord& c : o.record.cycles) {
      const double gap = c.F_value - report.f_star;
      std::snprintf(buf, sizeof buf, "%s,%.17g,%.17g\n", o.label.c_str(), c.cpu_total_s, gap);
      vs_cpu << buf;
      std::snprintf(buf, sizeof buf, "%s,%lld,%.17g\n", o.label.c_str(), static_cast<long long>(c.k), gap);
      vs_cycles << buf;
    }
  }
  auto script = open_csv(out / "plot.py");
  script << kPlotScript;
}

}  // namespace icbpg

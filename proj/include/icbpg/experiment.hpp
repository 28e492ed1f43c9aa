#pragma once

// Calibration of a reference optimum and schedule-comparison experiments.

#include <filesystem>
#include <string>
#include <vector>

#include "icbpg/dataset.hpp"
#include "icbpg/solver.hpp"

namespace icbpg {

/// Upper bound on F(x) - F* from the scaled-residual dual point
/// theta = s (Ax - b), s = min(1, min_i lambda_i / ||A_i^T (Ax - b)||_inf).
double global_duality_gap(const CompositeProblem& problem, const Vector& x);

struct CalibrateOptions {
  /// Maximum number of cycles.
  Index budget = 2000;
  /// Stop once the global duality gap is <= gap_tolerance * (1 + |F|).
  double gap_tolerance = 1e-10;
  /// Accepted gap once zero-tolerance cycles stop moving x.
  double stall_tolerance = 1e-8;
  Index check_every = 5;
};

struct Calibration {
  double f_star = 0.0;
  Vector x_hat;
  /// ||x^0 - x_hat||_B with x^0 = 0; stands in for the distance to the solution set.
  double r_surrogate = 0.0;
  Index cycles = 0;
  double duality_gap = 0.0;
};

/// Zero-tolerance run from x^0 = 0 until the duality gap certifies F* to the
/// requested accuracy, or until the cycles stall with the gap within
/// stall_tolerance. Throws std::runtime_error otherwise.
Calibration calibrate(const CompositeProblem& problem, const CalibrateOptions& options = {});

/// Writes x_hat.txt and the f_star / r_surrogate / calibration_* manifest keys.
void store_calibration(const Calibration& c, Dataset& d, const std::filesystem::path& dir);
/// Throws std::runtime_error when the dataset has not been calibrated.
Calibration load_calibration(const Dataset& d, const std::filesystem::path& dir);

struct ExperimentPlan {
  std::vector<ToleranceSchedule> schedules;
  /// Absolute target on F(x^k) - F*.
  double eps = 0.0;
  Index max_cycles = 5000;
  int repetitions = 3;

  /// 1/k^2, 1e-4, 1e-6 and 1e-8 with eps = 1e-6 (1 + |F*|).
  static ExperimentPlan standard(double f_star);
};

struct ScheduleOutcome {
  std::string label;
  /// Repetition with the median total CPU time.
  RunRecord record;
  std::vector<double> repetition_cpu;
  double final_gap = 0.0;
  bool converged = false;
};

struct ExperimentReport {
  double f_star = 0.0;
  double eps = 0.0;
  std::vector<ScheduleOutcome> outcomes;
};

/// Runs every schedule from x^0 = 0. `threads` bounds how many solves run at
/// once; each solve is single-threaded.
ExperimentReport run_experiment(const CompositeProblem& problem, const Calibration& calibration,
                                const ExperimentPlan& plan, int threads = 1);

/// Thread bound from ICBPG_THREADS (default 1).
int threads_from_env();

/// Per-schedule traces, summary.csv, plot data and plot.py.
void write_report(const ExperimentReport& report, const std::filesystem::path& out);

/// "fixed:0.0001" -> "fixed_0.0001".
std::string file_label(const std::string& schedule_label);

}  // namespace icbpg

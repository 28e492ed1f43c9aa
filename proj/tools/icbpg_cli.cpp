// icbpg: dataset generation, calibration, schedule comparison and verification.

#include <CLI11.hpp>

#include <cstdio>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>

#include "icbpg/dataset.hpp"
#include "icbpg/experiment.hpp"
#include "icbpg/solver.hpp"
#include "icbpg/verification.hpp"

namespace fs = std::filesystem;
using namespace icbpg;

namespace {

void print_summary(const ExperimentReport& report) {
  std::printf("%-14s %8s %12s %14s %12s %s\n", "schedule", "cycles", "cpu_s", "cpu/cycle", "final_gap",
              "converged");
  for (const ScheduleOutcome& o : report.outcomes) {
    const Index k = o.record.total_cycles();
    const double cpu = o.record.total_cpu();
    std::printf("%-14s %8lld %12.4f %14.3e %12.3e %s\n", o.label.c_str(), static_cast<long long>(k), cpu,
                k > 0 ? cpu / static_cast<double>(k) : 0.0, o.final_gap, o.converged ? "yes" : "no");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Inexact cyclic block proximal gradient for block LASSO"};
  app.require_subcommand(1);

  // generate
  DatasetSpec spec;
  std::string shape = "tall";
  std::optional<double> lambda;
  fs::path gen_out;
  auto* gen = app.add_subcommand("generate", "Write a random sparse LASSO instance");
  gen->add_option("--shape", shape, "tall (N x N/2) or wide (N x 2N)")->check(CLI::IsMember({"tall", "wide"}));
  gen->add_option("--n", spec.N, "Row count N")->check(CLI::PositiveNumber);
  gen->add_option("--p", spec.p, "Number of blocks")->check(CLI::PositiveNumber);
  gen->add_option("--seed", spec.seed, "Generator seed");
  gen->add_option("--nnz", spec.nnz_per_col, "Random nonzeros per column");
  gen->add_option("--lambda", lambda, "l1 weight (default 0.1 tall, 0.01 wide)");
  gen->add_option("--out", gen_out, "Output directory")->required();

  // calibrate
  fs::path data;
  CalibrateOptions cal_opts;
  auto* cal = app.add_subcommand("calibrate", "Compute the reference optimum F* for a dataset");
  cal->add_option("--data", data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  cal->add_option("--budget", cal_opts.budget, "Cycle budget")->check(CLI::PositiveNumber);
  cal->add_option("--gap-tolerance", cal_opts.gap_tolerance, "Relative duality-gap target");

  // run
  std::string schedule = "inv2:1";
  std::optional<double> eps;
  Index max_cycles = 5000;
  fs::path out;
  auto* run_cmd = app.add_subcommand("run", "Solve with one tolerance schedule");
  run_cmd->add_option("--data", data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  run_cmd->add_option("--schedule", schedule, "inv2:DTILDE or fixed:DELTA");
  run_cmd->add_option("--eps", eps, "Target F - F* (default 1e-6 (1 + |F*|))");
  run_cmd->add_option("--max-cycles", max_cycles, "Cycle cap")->check(CLI::NonNegativeNumber);
  run_cmd->add_option("--out", out, "Report directory")->required();

  // compare
  int repetitions = 3;
  auto* cmp = app.add_subcommand("compare", "Run 1/k^2, 1e-4, 1e-6 and 1e-8 schedules");
  cmp->add_option("--data", data, "Dataset directory")->required()->check(CLI::ExistingDirectory);
  cmp->add_option("--out", out, "Report directory")->required();
  cmp->add_option("--eps", eps, "Target F - F* (default 1e-6 (1 + |F*|))");
  cmp->add_option("--max-cycles", max_cycles, "Cycle cap per schedule")->check(CLI::NonNegativeNumber);
  cmp->add_option("--repetitions", repetitions, "Runs per schedule; the median CPU run is reported")
      ->check(CLI::PositiveNumber);

  // verify
  VerifyOptions vopts;
  fs::path verify_out = "verify_out";
  auto* ver = app.add_subcommand("verify", "Run the randomized invariant suites");
  ver->add_flag("--quick", vopts.quick, "Smaller instance counts");
  ver->add_option("--out", verify_out, "Directory for summary.json and grid CSVs");
  ver->add_option("--seed", vopts.seed, "Base seed");
  ver->add_flag("--inject-certificate-fault", vopts.inject_certificate_fault)->group("");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*gen) {
      spec.shape = parse_shape(shape);
      spec.lambda = lambda;
      const Dataset d = generate_dataset(spec);
      write_dataset(d, gen_out);
      std::printf("wrote %lld x %lld matrix (%lld nonzeros, %lld blocks) to %s\n",
                  static_cast<long long>(d.A.rows()), static_cast<long long>(d.A.cols()),
                  static_cast<long long>(d.A.nonZeros()), static_cast<long long>(d.partition.blocks()),
                  gen_out.string().c_str());
    } else if (*cal) {
      Dataset d = load_dataset(data);
      const CompositeProblem problem = make_problem(d);
      const Calibration c = calibrate(problem, cal_opts);
      store_calibration(c, d, data);
      std::printf("F* = %.17g after %lld cycles (duality gap %.3e, R surrogate %.6g)\n", c.f_star,
                  static_cast<long long>(c.cycles), c.duality_gap, c.r_surrogate);
    } else if (*run_cmd || *cmp) {
      const Dataset d = load_dataset(data);
      const Calibration c = load_calibration(d, data);
      const CompositeProblem problem = make_problem(d);
      ExperimentPlan plan = ExperimentPlan::standard(c.f_star);
      if (*run_cmd) {
        plan.schedules = {ToleranceSchedule::parse(schedule)};
        plan.repetitions = 1;
      } else {
        plan.repetitions = repetitions;
      }
      if (eps) plan.eps = *eps;
      plan.max_cycles = max_cycles;
      const ExperimentReport report = run_experiment(problem, c, plan, threads_from_env());
      write_report(report, out);
      print_summary(report);
    } else if (*ver) {
      vopts.out_dir = verify_out;
      const VerifyReport report = run_verification(vopts);
      for (const SuiteResult& s : report.suites) {
        std::printf("%-4s %-30s checks=%-7ld violations=%-5ld %7.2fs  %s\n", s.passed() ? "PASS" : "FAIL",
                    s.name.c_str(), s.checks, s.violations, s.seconds, s.detail.c_str());
      }
      std::printf("summary: %s\n", (verify_out / "summary.json").string().c_str());
      return report.passed() ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 1;
  }
  return 0;
}

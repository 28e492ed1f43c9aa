// Acceptance checks, one per criterion. `acceptance --criterion N` runs one;
// without arguments all run. Each prints a single PASS/FAIL line.

#include <chrono>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>
#include <string>

#include "icbpg/dataset.hpp"
#include "icbpg/experiment.hpp"
#include "icbpg/prox.hpp"
#include "icbpg/solver.hpp"
#include "icbpg/subsolver.hpp"
#include "icbpg/theory.hpp"
#include "oracles.hpp"

using namespace icbpg;
using oracle::Mat;
using oracle::Vec;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances and limits.
constexpr double kCertificateSlack = 1e-9;
constexpr double kLipschitzSlack = 1e-9;
constexpr double kDiagnosticSlack = 1e-9;
constexpr double kGridMargin = -1e-12;
constexpr double kExactProxTolerance = 1e-6;
constexpr double kExactProxDelta = 1e-12;
constexpr double kOracleTolerance = 1e-8;
constexpr double kMinSeparation = 0.10;
constexpr double kTargetRelative = 1e-6;
constexpr int kProbes = 1000;
constexpr double kCertificateSeconds = 30.0;
constexpr double kLipschitzSeconds = 60.0;
constexpr double kGridSeconds = 60.0;
constexpr double kComparisonSeconds = 600.0;
constexpr Index kDiagnosticCycles = 200;
constexpr std::uint64_t kDatasetSeed = 7;

struct Outcome {
  bool pass = false;
  std::string detail;
};

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double random_delta(oracle::Gen& gen) {
  return gen.uniform() < 0.5 ? gen.uniform() : std::pow(10.0, gen.uniform(-6.0, 0.0));
}

Mat random_metric(oracle::Gen& gen, int n) { return gen.spd(n, std::pow(10.0, gen.uniform(-2.0, 1.0))); }

// Point near `center` whose quadratic gap contribution is about `target`.
Vec near(oracle::Gen& gen, const Vec& center, const Mat& B, double target, bool keep_zeros) {
  const Vec xi = gen.vec(center.size());
  const double q = std::max(xi.dot(B * xi), 1e-300);
  Vec u = center + std::sqrt(2.0 * target / q) * xi;
  if (keep_zeros) {
    for (Eigen::Index j = 0; j < u.size(); ++j) {
      if (center[j] == 0.0) u[j] = 0.0;
    }
  }
  return u;
}

ProxQuery make_query(const Mat& B, const Vec& x, const Vec& g, double lambda, double delta) {
  ProxQuery q;
  q.x = x;
  q.g = g;
  q.delta = delta;
  q.metric = std::make_shared<const BlockMetric>(BlockMetric::dense(B));
  q.psi = make_l1(lambda);
  return q;
}

Outcome certificate_equivalence() {
  Stopwatch sw;
  oracle::Gen gen(101);
  int disagreements = 0, bad_certificates = 0, members = 0, banded = 0;
  for (int t = 0; t < kProbes; ++t) {
    const int n = gen.integer(1, 20);
    const Mat B = random_metric(gen, n);
    const Vec x = gen.vec(n), g = gen.vec(n);
    const double lambda = gen.uniform(0.05, 1.5);
    const double delta = random_delta(gen);
    const Vec z = oracle::prox_cd(B, x, g, lambda);
    const double min = oracle::prox_phi(B, x, g, lambda, z);
    Vec u;
    switch (t % 3) {
      case 0: u = near(gen, z, B, std::max(delta, 1e-8) * std::pow(10.0, gen.uniform(-1.0, 1.0)), true); break;
      case 1: u = near(gen, z, B, std::max(delta, 1e-8) * std::pow(10.0, gen.uniform(-1.0, 1.0)), false); break;
      default: u = z + gen.vec(n, gen.uniform(0.0, 1.0)); break;
    }
    const double gap = oracle::prox_phi(B, x, g, lambda, u) - min;
    const double band = kCertificateSlack * (1.0 + std::abs(min));
    const ProxQuery q = make_query(B, x, g, lambda, delta);
    const Certification c = certify_second_prox(q, u);
    if (std::abs(gap - delta) <= band) {
      ++banded;
      continue;
    }
    const bool member = gap <= delta;
    members += member;
    if (member != c.certified) ++disagreements;
    if (c.certified) {
      const auto& cert = c.certificate;
      if (!check_certificate(q, cert, default_certificate_samples(q, u, z, 1000 + static_cast<std::uint64_t>(t), 200))) {
        ++bad_certificates;
      }
    }
  }
  const double s = sw.seconds();
  return {disagreements == 0 && bad_certificates == 0 && s < kCertificateSeconds,
          fmt("instances=%d members=%d in_band=%d disagreements=%d bad_certificates=%d seconds=%.2f (limit %.0f)",
              kProbes, members, banded, disagreements, bad_certificates, s, kCertificateSeconds)};
}

// Subsolver output for the query; its value gap is checked by the caller.
Vec inexact_point(const ProxQuery& q) {
  return box_gp_solve(LassoSubproblem::from_prox_query(q), q.x, q.delta).y;
}

Outcome lipschitz_bound() {
  Stopwatch sw;
  oracle::Gen gen(102);
  int violations = 0, nonmembers = 0;
  double worst = -1e300;
  for (int t = 0; t < kProbes; ++t) {
    const int n = gen.integer(1, 20);
    const Mat B = random_metric(gen, n);
    const double lambda = gen.uniform(0.05, 1.5);
    const Vec x = gen.vec(n), g = gen.vec(n);
    const Vec y = x + gen.vec(n, std::pow(10.0, gen.uniform(-3.0, 0.0)));
    const Vec h = g + gen.vec(n, std::pow(10.0, gen.uniform(-3.0, 0.0)));
    const double delta = gen.uniform() < 0.1 ? 0.0 : random_delta(gen);
    const double eps = gen.uniform() < 0.1 ? 0.0 : random_delta(gen);
    const ProxQuery a = make_query(B, x, g, lambda, delta), b = make_query(B, y, h, lambda, eps);
    const Vec u = inexact_point(a), w = inexact_point(b);
    // Both points must really be members for the probe to count.
    const double ga = oracle::prox_phi(B, x, g, lambda, u) - oracle::prox_phi(B, x, g, lambda, oracle::prox_cd(B, x, g, lambda));
    const double gb = oracle::prox_phi(B, y, h, lambda, w) - oracle::prox_phi(B, y, h, lambda, oracle::prox_cd(B, y, h, lambda));
    if (ga > delta + 1e-9 || gb > eps + 1e-9) ++nonmembers;
    const Vec d = u - w;
    const double lhs = std::sqrt(d.dot(B * d));
    const double rhs = lipschitz_bound_rhs(*a.metric, x, y, g, h, delta, eps);
    worst = std::max(worst, lhs - rhs);
    if (lhs > rhs + kLipschitzSlack) ++violations;
  }
  const double s = sw.seconds();
  return {violations == 0 && nonmembers == 0 && s < kLipschitzSeconds,
          fmt("probes=%d violations=%d nonmembers=%d max(lhs-rhs)=%.3e seconds=%.2f (limit %.0f)", kProbes, violations,
              nonmembers, worst, s, kLipschitzSeconds)};
}

Outcome inclusions() {
  oracle::Gen gen(103);
  int rock_members = 0, rock_violations = 0, grad_violations = 0;
  for (int t = 0; t < kProbes; ++t) {
    const int n = gen.integer(1, 20);
    const Vec x = gen.vec(n, 2.0);
    const double lambda = gen.uniform(0.1, 1.5), delta = random_delta(gen);
    const Vec exact = oracle::soft(x, lambda);
    const Vec u = near(gen, exact, Mat::Identity(n, n), std::max(delta, 1e-8) * std::pow(10.0, gen.uniform(-1.0, 1.0)),
                       gen.uniform() < 0.5);
    if (!rockafellar_membership(x, delta, u, lambda)) continue;
    ++rock_members;
    auto phi = [&](const Vec& z) { return 0.5 * (z - x).squaredNorm() + lambda * z.lpNorm<1>(); };
    if (phi(u) - phi(exact) > delta + kCertificateSlack * (1.0 + std::abs(phi(exact)))) ++rock_violations;
  }
  for (int t = 0; t < kProbes; ++t) {
    const int n = gen.integer(1, 20);
    const Mat B = random_metric(gen, n);
    const double lambda = gen.uniform(0.05, 1.5), delta = random_delta(gen);
    const Vec x = gen.vec(n), g = gen.vec(n), e = gen.vec(n, std::pow(10.0, gen.uniform(-3.0, 0.0)));
    // Member of the prox set for the perturbed gradient g + e.
    const Vec zp = oracle::prox_cd(B, x, g + e, lambda);
    Vec u = near(gen, zp, B, delta * gen.uniform(), gen.uniform() < 0.5);
    const double min_p = oracle::prox_phi(B, x, g + e, lambda, zp);
    if (oracle::prox_phi(B, x, g + e, lambda, u) - min_p > delta) u = zp;
    const double min = oracle::prox_phi(B, x, g, lambda, oracle::prox_cd(B, x, g, lambda));
    const double e_dual = std::sqrt(e.dot(B.llt().solve(e)));
    const double allowed = gradient_error_embedding(delta, e_dual);
    if (oracle::prox_phi(B, x, g, lambda, u) - min > allowed + kCertificateSlack * (1.0 + std::abs(min))) {
      ++grad_violations;
    }
  }
  return {rock_members > 0 && rock_violations == 0 && grad_violations == 0,
          fmt("rockafellar probes=%d members=%d violations=%d; gradient_error probes=%d violations=%d", kProbes,
              rock_members, rock_violations, kProbes, grad_violations)};
}

struct TallSetup {
  CompositeProblem problem;
  Calibration cal;
};

TallSetup tall_setup() {
  DatasetSpec spec;
  spec.seed = kDatasetSeed;
  CompositeProblem problem = make_problem(generate_dataset(spec));
  Calibration cal = calibrate(problem);
  return {std::move(problem), std::move(cal)};
}

RunRecord diagnostic_run(const TallSetup& s, const ToleranceSchedule& schedule, Index cycles) {
  SolverConfig cfg;
  cfg.schedule = schedule;
  cfg.diagnostics = true;
  cfg.stopping.max_cycles = cycles;
  cfg.stopping.f_star = s.cal.f_star;
  cfg.r_surrogate = s.cal.r_surrogate;
  return run(s.problem, Vector::Zero(s.problem.dimension()), cfg);
}

const ToleranceSchedule kDecreasing = ToleranceSchedule::inverse_square(1.0);
const ToleranceSchedule kFixed = ToleranceSchedule::fixed(1e-4);

Outcome sufficient_decrease() {
  const TallSetup s = tall_setup();
  std::string detail;
  bool pass = true;
  for (const auto& schedule : {kDecreasing, kFixed}) {
    const RunRecord rec = diagnostic_run(s, schedule, kDiagnosticCycles);
    long blocks = 0, block_fail = 0, full_fail = 0;
    double worst = 1e300;
    for (std::size_t k = 1; k < rec.cycles.size(); ++k) {
      const auto& c = rec.cycles[k];
      const double tol = kDiagnosticSlack * (1.0 + std::abs(rec.cycles[k - 1].F_value));
      for (double sl : c.block_decrease_slack) {
        ++blocks;
        worst = std::min(worst, sl / tol);
        if (sl < -tol) ++block_fail;
      }
      if (!c.full_decrease_slack || *c.full_decrease_slack < -tol) ++full_fail;
    }
    const bool ok = block_fail == 0 && full_fail == 0 && rec.total_cycles() == kDiagnosticCycles;
    pass = pass && ok;
    detail += fmt("%s: cycles=%lld block_steps=%ld block_fail=%ld cycle_fail=%ld; ", schedule.label().c_str(),
                  static_cast<long long>(rec.total_cycles()), blocks, block_fail, full_fail);
  }
  return {pass, detail};
}

Outcome recurrence_surrogate() {
  const TallSetup s = tall_setup();
  std::string detail = fmt("surrogate R=%.6g; ", s.cal.r_surrogate);
  bool pass = true;
  for (const auto& schedule : {kDecreasing, kFixed}) {
    const RunRecord rec = diagnostic_run(s, schedule, kDiagnosticCycles);
    long fail = 0;
    for (std::size_t k = 1; k < rec.cycles.size(); ++k) {
      const auto& c = rec.cycles[k];
      const double tol = kDiagnosticSlack * (1.0 + std::abs(rec.cycles[k - 1].F_value));
      if (!c.recurrence_slack || *c.recurrence_slack < -tol) ++fail;
    }
    pass = pass && fail == 0 && rec.recurrence_under_surrogate;
    detail += fmt("%s: cycles=%lld fail=%ld; ", schedule.label().c_str(), static_cast<long long>(rec.total_cycles()), fail);
  }
  return {pass, detail + "conditional on the surrogate R"};
}

Outcome theorem_domination() {
  const TallSetup s = tall_setup();
  theory::ProblemConstants pc;
  pc.p = s.problem.blocks();
  pc.l_min = s.problem.l_min();
  pc.l_max = s.problem.l_max();
  pc.l_f = s.problem.l_f();
  pc.R = s.cal.r_surrogate;
  const double F0 = full_objective(s.problem, Vector::Zero(s.problem.dimension()));
  const double F0_gap = F0 - s.cal.f_star;
  const double eps = kTargetRelative * (1.0 + std::abs(s.cal.f_star));
  bool pass = true;
  std::string detail = fmt("F0-F*=%.4g; ", F0_gap);

  auto first_hit = [&](const RunRecord& rec) -> Index {
    for (const auto& c : rec.cycles) {
      if (c.F_value - s.cal.f_star <= eps) return c.k;
    }
    return -1;
  };

  {
    const RunRecord rec = diagnostic_run(s, kDecreasing, kDiagnosticCycles);
    long fail = 0;
    for (const auto& c : rec.cycles) {
      if (c.k < 4) continue;
      const double bound = theory::theorem_decreasing_bound(pc, 1.0, 1.0, F0_gap, c.k);
      if (c.F_value - s.cal.f_star > bound) ++fail;
    }
    const Index K = theory::corollary_decreasing_K(pc, 1.0, 1.0, F0_gap, eps);
    const Index hit = first_hit(rec);
    const bool k_ok = hit >= 0 && K >= hit;
    pass = pass && fail == 0 && k_ok;
    detail += fmt("inv2:1 bound_fail=%ld K=%lld observed=%lld; ", fail, static_cast<long long>(K),
                  static_cast<long long>(hit));
  }
  {
    const RunRecord rec = diagnostic_run(s, kFixed, kDiagnosticCycles);
    long fail = 0;
    double excess = 0.0;
    for (const auto& c : rec.cycles) {
      if (c.k < 2) continue;
      const double bound = theory::theorem_fixed_bound(pc, 1e-4, F0_gap, c.k);
      excess = std::max(excess, c.F_value - s.cal.f_star - bound);
      if (c.F_value - s.cal.f_star > bound) ++fail;
    }
    pass = pass && fail == 0;
    const double u = theory::fixed_constants(pc, 1e-4, F0_gap).u;
    if (eps > u) {
      const Index K = theory::corollary_fixed_K(pc, 1e-4, F0_gap, eps);
      const Index hit = first_hit(rec);
      const bool k_ok = hit >= 0 ? K >= hit : K > rec.total_cycles() && [&] {
        SolverConfig cfg;
        cfg.schedule = kFixed;
        cfg.stopping.f_star = s.cal.f_star;
        cfg.stopping.target_gap = eps;
        cfg.stopping.max_cycles = K;
        return run(s.problem, Vector::Zero(s.problem.dimension()), cfg).termination == Termination::TargetGap;
      }();
      pass = pass && k_ok;
      detail += fmt("fixed:1e-4 bound_fail=%ld max_excess=%.3e K=%lld observed=%lld", fail, excess,
                    static_cast<long long>(K), static_cast<long long>(hit));
    } else {
      detail += fmt("fixed:1e-4 bound_fail=%ld max_excess=%.3e K not defined (eps=%.3g <= floor u=%.3g)", fail,
                    excess, eps, u);
    }
  }
  return {pass, detail};
}

Outcome lemma_simulator_grid() {
  Stopwatch sw;
  bool pass = true;
  std::string detail;
  for (auto mode : {theory::SweepMode::Fixed, theory::SweepMode::Decreasing}) {
    const auto cells = theory::lemma_grid_sweep(mode, theory::GridSpec{});
    long fail = 0;
    double worst = 1e300;
    std::string failing;
    for (const auto& c : cells) {
      worst = std::min(worst, c.margin);
      if (c.margin < kGridMargin) {
        ++fail;
        failing += fmt(" (gamma=%g,D=%g,A0=%g,k=%lld,margin=%.3e)", c.gamma, c.delta_or_D, c.A0,
                       static_cast<long long>(c.k), c.margin);
      }
    }
    pass = pass && fail == 0 && cells.size() >= 27;
    detail += fmt("%s cells=%zu fail=%ld min_margin=%.3e%s; ", mode == theory::SweepMode::Fixed ? "fixed" : "decreasing",
                  cells.size(), fail, worst, failing.c_str());
  }
  const double s = sw.seconds();
  return {pass && s < kGridSeconds, detail + fmt("seconds=%.2f (limit %.0f)", s, kGridSeconds)};
}

Outcome exact_prox_consistency() {
  oracle::Gen gen(108);
  double worst = 0.0;
  int fail = 0;
  constexpr int kBlocks = 100;
  constexpr int kBlockSize = 100;
  for (int t = 0; t < kBlocks; ++t) {
    const double c = gen.uniform(0.5, 5.0), lambda = gen.uniform(0.05, 1.5);
    const Vec x = gen.vec(kBlockSize, 2.0), g = gen.vec(kBlockSize);
    ProxQuery q;
    q.x = x;
    q.g = g;
    q.delta = kExactProxDelta;
    q.metric = std::make_shared<const BlockMetric>(BlockMetric::scaled_identity(kBlockSize, c));
    q.psi = make_l1(lambda);
    const SubsolverResult r = box_gp_solve(LassoSubproblem::from_prox_query(q), x, kExactProxDelta);
    const double err = (r.y - oracle::soft(x - g / c, lambda / c)).lpNorm<Eigen::Infinity>();
    worst = std::max(worst, err);
    if (!r.converged || err > kExactProxTolerance) ++fail;
  }
  return {fail == 0, fmt("blocks=%d size=%d delta=%.0e max_abs_err=%.3e fail=%d (tol %.0e)", kBlocks, kBlockSize,
                         kExactProxDelta, worst, fail, kExactProxTolerance)};
}

Outcome oracle_equivalence() {
  // One 100-column block cannot carry the generator's identity rows on 50 rows, so the
  // instance is drawn directly.
  oracle::Gen gen(109);
  Mat A = gen.mat(50, 100);
  for (Eigen::Index j = 0; j < A.size(); ++j) {
    if (gen.uniform() < 0.8) A.data()[j] = 0.0;
  }
  Vec b = gen.vec(50);
  b /= b.norm();
  const double lambda = 0.01;
  ProblemOptions opts;
  opts.family = MetricFamily::Identity;
  const CompositeProblem problem(oracle::sparse(A), b, BlockPartition({100}), lambda, opts);
  SolverConfig cfg;
  cfg.schedule = ToleranceSchedule::fixed(0.0);
  cfg.stopping.max_cycles = 50;
  const RunRecord rec = run(problem, Vector::Zero(problem.dimension()), cfg);
  const double L = problem.lipschitz(0);
  const auto ref = oracle::ista(A, b, lambda, L, Vec::Zero(A.cols()), 50);
  double worst = 0.0;
  for (std::size_t k = 0; k < ref.size() && k < rec.cycles.size(); ++k) {
    worst = std::max(worst, std::abs(rec.cycles[k].F_value - ref[k]));
  }
  const double lmax = oracle::max_eigenvalue(A.transpose() * A);
  return {rec.cycles.size() == ref.size() && worst <= kOracleTolerance && L >= lmax * (1.0 - 1e-12),
          fmt("%zux%zu p=1 cycles=%lld max|F-F_ref|=%.3e (tol %.0e) L=%.12g eig_max=%.12g", static_cast<size_t>(A.rows()),
              static_cast<size_t>(A.cols()), static_cast<long long>(rec.total_cycles()), worst, kOracleTolerance, L, lmax)};
}

Outcome schedule_comparison() {
  Stopwatch sw;
  bool pass = true;
  std::string detail;
  for (Shape shape : {Shape::Tall, Shape::Wide}) {
    DatasetSpec spec;
    spec.shape = shape;
    spec.seed = kDatasetSeed;
    const CompositeProblem problem = make_problem(generate_dataset(spec));
    const Calibration cal = calibrate(problem);
    const ExperimentPlan plan = ExperimentPlan::standard(cal.f_star);
    const ExperimentReport rep = run_experiment(problem, cal, plan, threads_from_env());
    const auto& o = rep.outcomes;
    bool cpu_ordered = true, cycles_ordered = true, converged = true;
    for (std::size_t j = 0; j < o.size(); ++j) {
      converged = converged && o[j].converged;
      if (j > 0) {
        cpu_ordered = cpu_ordered && o[j - 1].record.total_cpu() < o[j].record.total_cpu();
        cycles_ordered = cycles_ordered && o[j - 1].record.total_cycles() >= o[j].record.total_cycles();
      }
    }
    double lo = 1e300, hi = 0.0;
    for (const auto& s : o) {
      lo = std::min(lo, s.record.total_cpu());
      hi = std::max(hi, s.record.total_cpu());
    }
    const double separation = hi > 0.0 ? (hi - lo) / hi : 0.0;
    const bool ok = o.size() == 4 && cpu_ordered && cycles_ordered && converged && separation >= kMinSeparation;
    pass = pass && ok;
    detail += to_string(shape) + ":";
    for (const auto& s : o) {
      detail += fmt(" %s cycles=%lld cpu=%.3fs gap=%.2e%s;", s.label.c_str(), static_cast<long long>(s.record.total_cycles()),
                    s.record.total_cpu(), s.final_gap, s.converged ? "" : " (not converged)");
    }
    detail += fmt(" cpu_ordered=%d cycles_reverse=%d all_converged=%d separation=%.1f%%; ", cpu_ordered, cycles_ordered,
                  converged, 100.0 * separation);
  }
  const double s = sw.seconds();
  return {pass && s < kComparisonSeconds, detail + fmt("seconds=%.1f (limit %.0f)", s, kComparisonSeconds)};
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

Outcome determinism() {
  const fs::path root = fs::temp_directory_path() / "icbpg_acceptance_determinism";
  fs::remove_all(root);
  DatasetSpec spec;
  spec.N = 600;
  spec.seed = kDatasetSeed;
  bool files_equal = true, traces_equal = true;
  write_dataset(generate_dataset(spec), root / "a");
  write_dataset(generate_dataset(spec), root / "b");
  for (const char* f : {"A.mtx", "b.txt", "manifest.txt"}) files_equal = files_equal && slurp(root / "a" / f) == slurp(root / "b" / f);
  const CompositeProblem problem = make_problem(load_dataset(root / "a"));
  int schedules = 0;
  for (const auto& schedule : {kDecreasing, kFixed, ToleranceSchedule::fixed(1e-8)}) {
    std::string first;
    for (int rep = 0; rep < 2; ++rep) {
      SolverConfig cfg;
      cfg.schedule = schedule;
      cfg.stopping.max_cycles = 50;
      std::ostringstream out;
      write_trace_csv(run(problem, Vector::Zero(problem.dimension()), cfg), out, std::nullopt, false);
      if (rep == 0) first = out.str();
      else traces_equal = traces_equal && first == out.str();
    }
    ++schedules;
  }
  fs::remove_all(root);
  return {files_equal && traces_equal,
          fmt("dataset files identical=%d; traces identical over %d schedules=%d (CPU columns excluded)", files_equal,
              schedules, traces_equal)};
}

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, std::pair<const char*, std::function<Outcome()>>> criteria{
      {1, {"certificate_equivalence", certificate_equivalence}},
      {2, {"lipschitz_bound", lipschitz_bound}},
      {3, {"inclusions", inclusions}},
      {4, {"sufficient_decrease", sufficient_decrease}},
      {5, {"recurrence_surrogate", recurrence_surrogate}},
      {6, {"theorem_domination", theorem_domination}},
      {7, {"lemma_simulator_grid", lemma_simulator_grid}},
      {8, {"exact_prox_consistency", exact_prox_consistency}},
      {9, {"oracle_equivalence", oracle_equivalence}},
      {10, {"schedule_comparison", schedule_comparison}},
      {11, {"determinism", determinism}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) {
    if (std::strcmp(argv[i], "--criterion") == 0 && i + 1 < argc) {
      selected.push_back(std::atoi(argv[++i]));
    } else {
      std::fprintf(stderr, "usage: %s [--criterion N]...\n", argv[0]);
      return 2;
    }
  }
  if (selected.empty()) {
    for (const auto& [n, _] : criteria) selected.push_back(n);
  }
  bool all = true;
  for (int n : selected) {
    const auto it = criteria.find(n);
    if (it == criteria.end()) {
      std::fprintf(stderr, "unknown criterion %d\n", n);
      return 2;
    }
    Outcome o;
    try {
      o = it->second.second();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    std::printf("AC%02d %s %s: %s\n", n, o.pass ? "PASS" : "FAIL", it->second.first, o.detail.c_str());
    std::fflush(stdout);
    all = all && o.pass;
  }
  return all ? 0 : 1;
}

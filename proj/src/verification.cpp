#include "icbpg/verification.hpp"

#include <json.hpp>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <memory>
#include <sstream>

#include "icbpg/dataset.hpp"
#include "icbpg/experiment.hpp"
#include "icbpg/prox.hpp"
#include "icbpg/rng.hpp"
#include "icbpg/solver.hpp"
#include "icbpg/subsolver.hpp"
#include "icbpg/theory.hpp"

namespace icbpg {

namespace {

namespace fs = std::filesystem;

class Timer {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

Vector normal_vector(CounterRng& rng, Index n, double scale = 1.0) {
  Vector v(n);
  for (Index j = 0; j < n; ++j) v[j] = scale * rng.normal();
  return v;
}

// G G^T / n + c I with c spread over three decades.
Matrix random_spd(CounterRng& rng, Index n) {
  Matrix g(n, n);
  for (Index r = 0; r < n; ++r) {
    for (Index c = 0; c < n; ++c) g(r, c) = rng.normal();
  }
  const double shift = std::pow(10.0, rng.uniform(-2.0, 1.0));
  Matrix b = g * g.transpose() / static_cast<double>(n);
  b.diagonal().array() += shift;
  return b;
}

// Half the draws uniform on [0, 1], half log-uniform on [1e-6, 1].
double random_delta(CounterRng& rng) {
  if (rng.uniform() < 0.5) return rng.uniform();
  return std::pow(10.0, rng.uniform(-6.0, 0.0));
}

ProxQuery random_query(CounterRng& rng, Index n, double delta) {
  ProxQuery q;
  q.x = normal_vector(rng, n);
  q.g = normal_vector(rng, n);
  q.delta = delta;
  q.metric = std::make_shared<const BlockMetric>(BlockMetric::dense(random_spd(rng, n)));
  q.psi = make_l1(rng.uniform(0.05, 1.5));
  return q;
}

// Perturbation of `center` whose quadratic part of the gap is about
// delta * 10^U(-1, 1); zero entries of `center` are kept at zero half the time.
Vector perturb(CounterRng& rng, const Vector& center, const BlockMetric& metric, double delta) {
  const Index n = center.size();
  const Vector xi = normal_vector(rng, n);
  const double q = std::max(metric.squared_norm(xi), 1e-300);
  const double target = std::max(delta, 1e-8) * std::pow(10.0, rng.uniform(-1.0, 1.0));
  Vector u = center + std::sqrt(2.0 * target / q) * xi;
  if (rng.uniform() < 0.5) {
    for (Index j = 0; j < n; ++j) {
      if (center[j] == 0.0) u[j] = 0.0;
    }
  }
  return u;
}

Index random_dimension(CounterRng& rng, Index max_n) {
  return 1 + static_cast<Index>(rng.below(static_cast<std::uint64_t>(max_n)));
}

std::string counts(std::initializer_list<std::pair<const char*, long>> items) {
  std::ostringstream s;
  bool first = true;
  for (const auto& [k, v] : items) {
    s << (first ? "" : ", ") << k << '=' << v;
    first = false;
  }
  return s.str();
}

}  // namespace

bool VerifyReport::passed() const {
  return !suites.empty() && std::all_of(suites.begin(), suites.end(), [](const SuiteResult& s) { return s.passed(); });
}

std::string VerifyReport::to_json() const {
  nlohmann::json j;
  j["passed"] = passed();
  j["suites"] = nlohmann::json::array();
  for (const SuiteResult& s : suites) {
    j["suites"].push_back({{"name", s.name},
                           {"checks", s.checks},
                           {"violations", s.violations},
                           {"seconds", s.seconds},
                           {"passed", s.passed()},
                           {"detail", s.detail}});
  }
  return j.dump(2);
}

SuiteResult certificate_suite(int instances, std::uint64_t seed, bool inject_fault) {
  Timer timer;
  SuiteResult out;
  out.name = "prox_certificate_equivalence";
  long members = 0, certified = 0, positive_dp = 0, violations = 0;

#pragma omp parallel for schedule(dynamic) reduction(+ : members, certified, positive_dp, violations)
  for (int t = 0; t < instances; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t));
    const Index n = random_dimension(rng, 20);
    const ProxQuery q = random_query(rng, n, random_delta(rng));
    const ProxReference ref = reference_prox_minimum(q);

    Vector u;
    const double pick = rng.uniform();
    if (pick < 0.2) {
      u = ref.minimizer;
    } else if (pick < 0.85) {
      u = perturb(rng, ref.minimizer, *q.metric, q.delta);
    } else {
      u = normal_vector(rng, n);
    }

    const double gap = prox_value_gap(q, u, ref.value);
    const double slack = membership_slack(ref.value);
    Certification c = certify_second_prox(q, u);
    if (inject_fault) {
      // Push ||v||_B^* past the budget along B e_0.
      Vector dir = q.metric->apply(Vector::Unit(n, 0));
      dir /= q.metric->dual_norm(dir);
      c.certificate.v += (2.0 * std::sqrt(2.0 * q.delta) + 1.0) * dir;
    }
    bool ok = c.certified || inject_fault;
    if (ok) {
      const auto samples = default_certificate_samples(q, u, ref.minimizer, seed ^ static_cast<std::uint64_t>(t));
      ok = check_certificate(q, c.certificate, samples);
    }
    const bool member = gap <= q.delta + slack;
    if (member) ++members;
    if (ok) ++certified;
    if (ok && c.used_positive_delta_prime) ++positive_dp;
    if ((ok && gap > q.delta + slack) || (!ok && gap <= q.delta - slack)) ++violations;
  }
  out.checks = instances;
  out.violations = violations;
  out.detail = counts({{"members", members}, {"certified", certified}, {"positive_delta_prime", positive_dp}});
  if (inject_fault) out.detail += ", fault injected";
  out.seconds = timer.seconds();
  return out;
}

SuiteResult lipschitz_suite(int probes, std::uint64_t seed) {
  Timer timer;
  SuiteResult out;
  out.name = "lipschitz_bound";
  long violations = 0;
  double worst = -1e300;

#pragma omp parallel for schedule(dynamic) reduction(+ : violations) reduction(max : worst)
  for (int t = 0; t < probes; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t));
    const Index n = random_dimension(rng, 20);
    ProxQuery a = random_query(rng, n, rng.uniform() < 0.1 ? 0.0 : random_delta(rng));
    ProxQuery b = a;
    b.delta = rng.uniform() < 0.1 ? 0.0 : random_delta(rng);
    b.x = a.x + normal_vector(rng, n, std::pow(10.0, rng.uniform(-3.0, 0.0)));
    b.g = a.g + normal_vector(rng, n, std::pow(10.0, rng.uniform(-3.0, 0.0)));

    const SubsolverResult ru = box_gp_solve(LassoSubproblem::from_prox_query(a), a.x, a.delta);
    const SubsolverResult rw = box_gp_solve(LassoSubproblem::from_prox_query(b), b.x, b.delta);
    const double lhs = a.metric->norm(ru.y - rw.y);
    const double rhs = lipschitz_bound_rhs(*a.metric, a.x, b.x, a.g, b.g, a.delta, b.delta);
    worst = std::max(worst, lhs - rhs);
    if (!ru.converged || !rw.converged || lhs > rhs + 1e-9) ++violations;
  }
  out.checks = probes;
  out.violations = violations;
  std::ostringstream d;
  d << "max(lhs - rhs)=" << worst;
  out.detail = d.str();
  out.seconds = timer.seconds();
  return out;
}

SuiteResult rockafellar_suite(int probes, std::uint64_t seed) {
  Timer timer;
  SuiteResult out;
  out.name = "rockafellar_inclusion";
  long inside = 0, violations = 0;

#pragma omp parallel for schedule(dynamic) reduction(+ : inside, violations)
  for (int t = 0; t < probes; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t));
    const Index n = random_dimension(rng, 20);
    const Vector x = normal_vector(rng, n, 2.0);
    const double lambda = rng.uniform(0.1, 1.5);
    const double delta = random_delta(rng);
    const Vector exact = exact_prox_l1(x, Vector::Zero(n), lambda, 1.0);
    const auto identity = BlockMetric::scaled_identity(n, 1.0);
    const Vector u = perturb(rng, exact, identity, delta);
    if (!rockafellar_membership(x, delta, u, lambda)) continue;
    ++inside;
    auto phi = [&](const Vector& z) { return 0.5 * (z - x).squaredNorm() + lambda * z.lpNorm<1>(); };
    const double min = phi(exact);
    if (phi(u) - min > delta + membership_slack(min)) ++violations;
  }
  out.checks = inside;
  out.violations = violations;
  out.detail = counts({{"probes", probes}, {"memberships", inside}});
  out.seconds = timer.seconds();
  return out;
}

SuiteResult gradient_error_suite(int probes, std::uint64_t seed) {
  Timer timer;
  SuiteResult out;
  out.name = "gradient_error_inclusion";
  long violations = 0;

#pragma omp parallel for schedule(dynamic) reduction(+ : violations)
  for (int t = 0; t < probes; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t));
    const Index n = random_dimension(rng, 20);
    const ProxQuery q = random_query(rng, n, random_delta(rng));
    const Vector e = normal_vector(rng, n, std::pow(10.0, rng.uniform(-3.0, 0.0)));
    ProxQuery perturbed = q;
    perturbed.g = q.g + e;
    const SubsolverResult r = box_gp_solve(LassoSubproblem::from_prox_query(perturbed), q.x, q.delta);
    const ProxReference ref = reference_prox_minimum(q);
    const double inflated = gradient_error_embedding(q.delta, q.metric->dual_norm(e));
    if (!r.converged || prox_value_gap(q, r.y, ref.value) > inflated + membership_slack(ref.value)) {
      ++violations;
    }
  }
  out.checks = probes;
  out.violations = violations;
  out.seconds = timer.seconds();
  return out;
}

SuiteResult subsolver_suite(int instances, std::uint64_t seed) {
  Timer timer;
  SuiteResult out;
  out.name = "subsolver_invariants";
  long checks = 0, violations = 0;
  long gap_fail = 0, monotone_fail = 0, bound_fail = 0, closed_form_fail = 0;

#pragma omp parallel for schedule(dynamic) reduction(+ : checks, violations, gap_fail, monotone_fail, bound_fail, closed_form_fail)
  for (int t = 0; t < instances; ++t) {
    CounterRng rng(seed, static_cast<std::uint64_t>(t));
    const Index n = random_dimension(rng, 12);
    const Index m = std::max<Index>(2, n - 4 + static_cast<Index>(rng.below(20)));
    std::vector<Eigen::Triplet<double, int>> trip;
    for (Index c = 0; c < n; ++c) {
      for (Index r = 0; r < m; ++r) {
        if (rng.uniform() < 0.5) trip.emplace_back(static_cast<int>(r), static_cast<int>(c), rng.uniform());
      }
    }
    auto a = std::make_shared<SparseMatrix>(m, n);
    a->setFromTriplets(trip.begin(), trip.end());
    a->makeCompressed();
    const Vector bt = normal_vector(rng, m);
    const kernels::ColumnRange cols{a.get(), 0, n};
    Vector atb(n);
    kernels::serial::gather(cols, kernels::view(bt), kernels::view(atb));
    const double lambda = rng.uniform(0.05, 1.0) * std::max(atb.lpNorm<Eigen::Infinity>(), 1e-3);
    const LassoSubproblem sub(cols, bt, lambda, std::nullopt, a);

    const double delta = random_delta(rng);
    SubsolverOptions opts;
    opts.record_trace = true;
    const SubsolverResult r = box_gp_solve(sub, normal_vector(rng, n), delta, DecreaseGuard::none(), opts);
    const SubsolverResult best = box_gp_solve(sub, r.y, 0.0);

    ++checks;
    if (!r.converged || r.duality_gap > delta || r.duality_gap < 0.0) ++gap_fail;
    for (std::size_t j = 1; j < r.primal_trace.size(); ++j) {
      ++checks;
      if (r.primal_trace[j] > r.primal_trace[j - 1] + 1e-12 * std::max(1.0, std::abs(r.primal_trace[j - 1]))) {
        ++monotone_fail;
      }
    }
    // P(y) - P* <= gap(y), with P(best) >= P*.
    ++checks;
    if (sub.primal(r.y) - sub.primal(best.y) > duality_gap(sub, r.y) + 1e-10) ++bound_fail;

    // c*I columns: the subproblem is a scaled soft-threshold.
    const double c = rng.uniform(0.5, 3.0);
    auto diag = std::make_shared<SparseMatrix>(n, n);
    for (Index j = 0; j < n; ++j) diag->insert(j, j) = c;
    diag->makeCompressed();
    const Vector bd = normal_vector(rng, n, 2.0);
    const LassoSubproblem dsub({diag.get(), 0, n}, bd, lambda, std::nullopt, diag);
    const SubsolverResult dr = box_gp_solve(dsub, Vector::Zero(n), 1e-12);
    const Vector expected = exact_prox_l1(bd / c, Vector::Zero(n), lambda, c * c);
    // Strong convexity c^2: ||y - y*|| <= sqrt(2 gap) / c.
    ++checks;
    if ((dr.y - expected).norm() > std::sqrt(2.0 * dr.duality_gap) / c + 1e-9) ++closed_form_fail;
  }
  violations = gap_fail + monotone_fail + bound_fail + closed_form_fail;
  out.checks = checks;
  out.violations = violations;
  out.detail = counts({{"gap", gap_fail}, {"monotone", monotone_fail}, {"gap_bound", bound_fail},
                       {"closed_form", closed_form_fail}});
  out.seconds = timer.seconds();
  return out;
}

SuiteResult diagnostics_suite(Index N, Index cycles, std::uint64_t seed) {
  Timer timer;
  SuiteResult out;
  out.name = "icbpg_diagnostics";
  DatasetSpec spec;
  spec.shape = Shape::Tall;
  spec.N = N;
  spec.seed = seed;
  const Dataset d = generate_dataset(spec);
  const CompositeProblem problem = make_problem(d);
  const Calibration cal = calibrate(problem);

  long block_fail = 0, full_fail = 0, rec_fail = 0, mono_fail = 0, checks = 0;
  for (const ToleranceSchedule& s : {ToleranceSchedule::inverse_square(1.0), ToleranceSchedule::fixed(1e-4)}) {
    SolverConfig cfg;
    cfg.schedule = s;
    cfg.diagnostics = true;
    cfg.stopping.max_cycles = cycles;
    cfg.stopping.f_star = cal.f_star;
    cfg.r_surrogate = cal.r_surrogate;
    const RunRecord rec = run(problem, Vector::Zero(problem.dimension()), cfg);
    for (std::size_t k = 1; k < rec.cycles.size(); ++k) {
      const CycleRecord& c = rec.cycles[k];
      const double tol = 1e-9 * (1.0 + std::abs(rec.cycles[k - 1].F_value));
      for (double sl : c.block_decrease_slack) {
        ++checks;
        if (sl < -tol) ++block_fail;
      }
      ++checks;
      if (!c.full_decrease_slack || *c.full_decrease_slack < -tol) ++full_fail;
      ++checks;
      if (!c.recurrence_slack || *c.recurrence_slack < -tol) ++rec_fail;
      ++checks;
      if (c.F_value > rec.cycles[k - 1].F_value + 1e-12) ++mono_fail;
    }
  }
  out.checks = checks;
  out.violations = block_fail + full_fail + rec_fail + mono_fail;
  out.detail = counts({{"block_decrease", block_fail}, {"full_decrease", full_fail},
                       {"recurrence_surrogate_R", rec_fail}, {"monotone", mono_fail}});
  out.seconds = timer.seconds();
  return out;
}

SuiteResult theory_grid_suite(const std::optional<fs::path>& out_dir) {
  Timer timer;
  SuiteResult out;
  out.name = "lemma_grid";
  long violations = 0, vacuous = 0, slow = 0;
  const theory::GridSpec spec;
  for (const auto mode : {theory::SweepMode::Fixed, theory::SweepMode::Decreasing}) {
    const auto cells = theory::lemma_grid_sweep(mode, spec);
    for (const auto& c : cells) {
      ++out.checks;
      if (c.margin < -1e-12) ++violations;
      if (c.vacuous) ++vacuous;
      if (c.cases.slow() > 0) ++slow;
    }
    if (out_dir) {
      fs::create_directories(*out_dir);
      const fs::path path =
          *out_dir / (mode == theory::SweepMode::Fixed ? "lemma_grid_fixed.csv" : "lemma_grid_decreasing.csv");
      std::ofstream f(path);
      if (!f) throw std::runtime_error("cannot write " + path.string());
      theory::write_grid_csv(cells, f);
    }
  }
  out.violations = violations;
  out.detail = counts({{"cells", out.checks}, {"vacuous", vacuous}, {"cells_with_slow_steps", slow}});
  out.seconds = timer.seconds();
  return out;
}

VerifyReport run_verification(const VerifyOptions& o) {
  const int probes = o.quick ? 200 : 1000;
  VerifyReport report;
  report.suites.push_back(certificate_suite(probes, o.seed, o.inject_certificate_fault));
  report.suites.push_back(lipschitz_suite(probes, o.seed + 1));
  report.suites.push_back(rockafellar_suite(probes, o.seed + 2));
  report.suites.push_back(gradient_error_suite(probes, o.seed + 3));
  report.suites.push_back(subsolver_suite(o.quick ? 50 : 200, o.seed + 4));
  report.suites.push_back(diagnostics_suite(o.quick ? 400 : 2000, o.quick ? 60 : 200, o.seed + 5));
  report.suites.push_back(theory_grid_suite(o.out_dir));
  if (o.out_dir) {
    std::ofstream f(*o.out_dir / "summary.json");
    if (!f) throw std::runtime_error("cannot write summary.json");
    f << report.to_json() << '\n';
  }
  return report;
}

}  // namespace icbpg

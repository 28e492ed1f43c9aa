#include "icbpg/prox.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "icbpg/rng.hpp"

namespace icbpg {

// ---------------------------------------------------------------------------
// Regularizers

L1Norm::L1Norm(double weight) : weight_(weight) {
  if (!(weight >= 0.0)) throw std::invalid_argument("l1 weight must be non-negative");
}

double L1Norm::value(const Vector& x) const { return weight_ * x.lpNorm<1>(); }

Vector L1Norm::project_subdifferential(const Vector& u, const Vector& target) const {
  require_size(target.size(), u.size(), "subdifferential target");
  Vector s(u.size());
  for (Index j = 0; j < u.size(); ++j) {
    if (u[j] > 0.0) {
      s[j] = weight_;
    } else if (u[j] < 0.0) {
      s[j] = -weight_;
    } else {
      s[j] = std::clamp(target[j], -weight_, weight_);
    }
  }
  return s;
}

double L1Norm::subgradient_slack(const Vector& x, const Vector& s) const {
  require_size(s.size(), x.size(), "subgradient");
  if (s.size() > 0 && s.lpNorm<Eigen::Infinity>() > weight_) {
    return std::numeric_limits<double>::infinity();
  }
  return std::max(0.0, value(x) - s.dot(x));
}

bool L1Norm::is_eps_subgradient(const Vector& x, const Vector& s, double eps, double slack) const {
  require_size(s.size(), x.size(), "subgradient");
  if (s.size() > 0 && s.lpNorm<Eigen::Infinity>() > weight_ + slack) return false;
  return value(x) - s.dot(x) <= eps + slack;
}

std::shared_ptr<const L1Norm> make_l1(double weight) { return std::make_shared<const L1Norm>(weight); }

// ---------------------------------------------------------------------------
// Queries

void ProxQuery::validate() const {
  if (!metric) throw std::invalid_argument("prox query without metric");
  if (!psi) throw std::invalid_argument("prox query without regularizer");
  if (!(delta >= 0.0)) throw std::invalid_argument("prox tolerance must be non-negative");
  require_size(g.size(), x.size(), "prox linear term");
  require_size(metric->dimension(), x.size(), "prox metric");
}

const L1Norm& ProxQuery::l1() const {
  const auto* l1 = dynamic_cast<const L1Norm*>(psi.get());
  if (l1 == nullptr) {
    throw UnsupportedRegularizer("operation requires the l1 regularizer, got " +
                                 (psi ? psi->name() : std::string("none")));
  }
  return *l1;
}

double prox_objective(const ProxQuery& query, const Vector& z) {
  require_size(z.size(), query.dimension(), "prox point");
  const Vector d = z - query.x;
  return query.g.dot(z) + 0.5 * query.metric->squared_norm(d) + query.psi->value(z);
}

Vector exact_prox_l1(const Vector& x, const Vector& g, double lambda, double c) {
  if (!(c > 0.0)) throw std::invalid_argument("exact_prox_l1: metric scale must be positive");
  if (!(lambda >= 0.0)) throw std::invalid_argument("exact_prox_l1: lambda must be non-negative");
  require_size(g.size(), x.size(), "exact_prox_l1 linear term");
  const double thr = lambda / c;
  Vector y(x.size());
  for (Index j = 0; j < x.size(); ++j) {
    const double z = x[j] - g[j] / c;
    const double mag = std::abs(z) - thr;
    y[j] = mag > 0.0 ? std::copysign(mag, z) : 0.0;
  }
  return y;
}

double prox_value_gap(const ProxQuery& query, const Vector& u, double reference_min) {
  return prox_objective(query, u) - reference_min;
}

// ---------------------------------------------------------------------------
// Certificates

namespace {

ProxCertificate make_certificate(const Vector& u, const Vector& w, const Vector& s,
                                 const BlockMetric& metric, double lambda) {
  ProxCertificate c;
  c.u = u;
  c.subgrad_residual = s;
  c.v = s - w;
  c.v_dual_norm = metric.dual_norm(c.v);
  c.delta_prime = std::max(0.0, lambda * u.lpNorm<1>() - s.dot(u));
  return c;
}

double certified_delta(const ProxCertificate& c) {
  return 0.5 * c.v_dual_norm * c.v_dual_norm + c.delta_prime;
}

bool fits(const ProxCertificate& c, double delta) {
  return c.delta_prime <= delta && c.v_dual_norm <= std::sqrt(2.0 * (delta - c.delta_prime));
}

// Box QP over s in [-lambda, lambda]^n:
//   h(s) = 0.5 (s - w)^T M (s - w) + lambda*||u||_1 - <s, u>,   M = B^{-1}.
// z(s) = u - M(s - w) is a primal candidate, and phi(u) - phi(z(s)) is a lower
// bound on min h, which lets the loop stop once the decision is settled.
class DualBoxSolver {
 public:
  DualBoxSolver(const ProxQuery& q, const Vector& u, const Vector& w, double lambda)
      : q_(q), u_(u), w_(w), lambda_(lambda), l1u_(lambda * u.lpNorm<1>()), phi_u_(prox_objective(q, u)) {
    const Matrix b = q.metric->to_dense();
    Eigen::LLT<Matrix> llt(b);
    if (llt.info() != Eigen::Success) throw SingularMetricError("metric factorization failed");
    m_ = llt.solve(Matrix::Identity(b.rows(), b.cols()));
    m_ = 0.5 * (m_ + m_.transpose());
    const Eigen::SelfAdjointEigenSolver<Matrix> eig(m_, Eigen::EigenvaluesOnly);
    step_ = 1.0 / std::max(eig.eigenvalues().maxCoeff(), std::numeric_limits<double>::min());
    mw_ = m_ * w_;
  }

  double objective(const Vector& s) const {
    const Vector d = s - w_;
    return 0.5 * d.dot(m_ * d) + l1u_ - s.dot(u_);
  }

  double lower_bound(const Vector& s) const {
    const Vector z = u_ - m_ * (s - w_);
    return phi_u_ - prox_objective(q_, z);
  }

  Vector project(Vector s) const { return s.cwiseMax(-lambda_).cwiseMin(lambda_); }

  /// Newton step on the coordinates strictly inside the box; kept when it stays
  /// feasible and lowers h.
  bool polish(Vector& s, double& hs) const {
    std::vector<Index> free;
    for (Index j = 0; j < s.size(); ++j) {
      if (std::abs(s[j]) < lambda_ * (1.0 - 1e-12)) free.push_back(j);
    }
    if (free.empty()) return false;
    const Index nf = static_cast<Index>(free.size());
    Matrix mff(nf, nf);
    Vector rhs(nf);
    for (Index a = 0; a < nf; ++a) {
      // (M s)_F = (M w + u)_F  =>  M_FF s_F = (M w + u)_F - M_FX s_X
      double r = mw_[free[a]] + u_[free[a]];
      for (Index j = 0; j < s.size(); ++j) {
        if (std::find(free.begin(), free.end(), j) == free.end()) r -= m_(free[a], j) * s[j];
      }
      rhs[a] = r;
      for (Index c = 0; c < nf; ++c) mff(a, c) = m_(free[a], free[c]);
    }
    const Eigen::LDLT<Matrix> ldlt(mff);
    if (ldlt.info() != Eigen::Success) return false;
    const Vector sf = ldlt.solve(rhs);
    Vector cand = s;
    for (Index a = 0; a < nf; ++a) cand[free[a]] = sf[a];
    cand = project(cand);
    const double hc = objective(cand);
    if (hc < hs) {
      s = std::move(cand);
      hs = hc;
      return true;
    }
    return false;
  }

  /// Accelerated projected gradient with function-value restarts.
  Vector solve(Vector s, double delta, int max_iterations) const {
    double hs = objective(s);
    Vector y = s;
    double t = 1.0;
    const double floor = 1e-15 * (1.0 + std::abs(phi_u_));
    for (int it = 0; it < max_iterations; ++it) {
      if (hs <= delta) break;
      if (it % 25 == 0) {
        polish(s, hs);
        if (hs <= delta) break;
        const double lb = lower_bound(s);
        if (lb > delta || hs - lb <= floor) break;
      }
      const Vector grad = m_ * (y - w_) - u_;
      Vector next = project(y - step_ * grad);
      const double hn = objective(next);
      if (hn > hs) {
        // Restart from the last accepted point.
        y = s;
        t = 1.0;
        continue;
      }
      const double tn = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
      y = next + ((t - 1.0) / tn) * (next - s);
      t = tn;
      s = std::move(next);
      hs = hn;
    }
    return s;
  }

 private:
  const ProxQuery& q_;
  const Vector& u_;
  const Vector& w_;
  double lambda_;
  double l1u_;
  double phi_u_;
  Matrix m_;
  Vector mw_;
  double step_ = 1.0;
};

}  // namespace

Certification certify_second_prox(const ProxQuery& query, const Vector& u,
                                  const CertifyOptions& options) {
  query.validate();
  const L1Norm& psi = query.l1();
  require_size(u.size(), query.dimension(), "certified point");
  const BlockMetric& b = *query.metric;

  const Vector w = -(query.g + b.apply(u - query.x));
  Certification out;
  out.certificate = make_certificate(u, w, psi.project_subdifferential(u, w), b, psi.weight());
  out.certificate.delta_prime = 0.0;
  out.required_delta = certified_delta(out.certificate);
  out.certified = fits(out.certificate, query.delta);
  if (out.certified || !options.allow_positive_delta_prime || psi.weight() == 0.0) return out;

  const DualBoxSolver dual(query, u, w, psi.weight());
  const Vector s = dual.solve(out.certificate.subgrad_residual, query.delta, options.max_iterations);
  ProxCertificate alt = make_certificate(u, w, s, b, psi.weight());
  const double alt_required = certified_delta(alt);
  if (alt_required < out.required_delta) {
    out.certificate = std::move(alt);
    out.required_delta = alt_required;
    out.used_positive_delta_prime = true;
    out.certified = fits(out.certificate, query.delta);
  }
  return out;
}

bool check_certificate(const ProxQuery& query, const ProxCertificate& cert,
                       const std::vector<Vector>& y_samples) {
  query.validate();
  const double delta = query.delta;
  if (!(cert.delta_prime >= 0.0) || cert.delta_prime > delta) return false;
  require_size(cert.u.size(), query.dimension(), "certificate point");
  require_size(cert.v.size(), query.dimension(), "certificate vector");

  const BlockMetric& b = *query.metric;
  if (b.dual_norm(cert.v) > std::sqrt(2.0 * (delta - cert.delta_prime)) + 1e-12) return false;

  // Recomputed rather than trusted from the certificate.
  const Vector s = cert.v - query.g - b.apply(cert.u - query.x);
  const double psi_u = query.psi->value(cert.u);
  const Regularizer& psi = *query.psi;

  bool ok = true;
  const auto n = static_cast<std::ptrdiff_t>(y_samples.size());
#pragma omp parallel for schedule(static) reduction(&& : ok)
  for (std::ptrdiff_t k = 0; k < n; ++k) {
    const Vector& y = y_samples[static_cast<std::size_t>(k)];
    const double lhs = s.dot(y - cert.u);
    const double psi_y = psi.value(y);
    const double tol = 1e-12 * (1.0 + std::abs(psi_y) + std::abs(psi_u) + std::abs(lhs));
    ok = ok && (lhs <= psi_y - psi_u + cert.delta_prime + tol);
  }
  return ok;
}

std::vector<Vector> default_certificate_samples(const ProxQuery& query, const Vector& u,
                                                const Vector& exact_minimizer, std::uint64_t seed,
                                                int count) {
  const Index n = query.dimension();
  const double scale = query.metric->norm(u - query.x) + 1.0;
  std::vector<Vector> out;
  out.reserve(static_cast<std::size_t>(count + n + 2));
  CounterRng rng(seed, 0x5a);
  for (int k = 0; k < count; ++k) {
    Vector y(n);
    for (Index j = 0; j < n; ++j) y[j] = u[j] + scale * rng.normal();
    out.push_back(std::move(y));
  }
  out.push_back(exact_minimizer);
  out.push_back(Vector::Zero(n));
  for (Index j = 0; j < n; ++j) {
    Vector axis = Vector::Zero(n);
    axis[j] = exact_minimizer[j];
    out.push_back(std::move(axis));
  }
  return out;
}

bool delta_optimality_check(double psi_value_at_x, double psi_min, double delta) {
  return psi_value_at_x - psi_min <= delta;
}

bool holds_on_samples(const Regularizer& psi, const DeltaSubgradientWitness& w,
                      const std::vector<Vector>& y_samples, double slack) {
  const double psi_x = psi.value(w.x);
  for (const Vector& y : y_samples) {
    if (psi.value(y) < psi_x + w.s.dot(y - w.x) - w.delta - slack) return false;
  }
  return true;
}

bool rockafellar_membership(const Vector& x, double delta, const Vector& u, double lambda) {
  require_size(u.size(), x.size(), "approximate prox point");
  if (!(delta >= 0.0)) throw std::invalid_argument("tolerance must be non-negative");
  const L1Norm psi(lambda);
  // Componentwise closest r in the subdifferential to x - u.
  const Vector r = psi.project_subdifferential(u, x - u);
  return (u + r - x).norm() <= std::sqrt(2.0 * delta);
}

double gradient_error_embedding(double delta, double e_dual_norm) {
  if (delta < 0.0 || e_dual_norm < 0.0) {
    throw std::invalid_argument("gradient_error_embedding: inputs must be non-negative");
  }
  return delta + std::sqrt(2.0 * delta) * e_dual_norm + 0.5 * e_dual_norm * e_dual_norm;
}

double lipschitz_bound_rhs(const BlockMetric& metric, const Vector& x, const Vector& y,
                           const Vector& g, const Vector& h, double delta, double epsilon) {
  if (delta < 0.0 || epsilon < 0.0) throw std::invalid_argument("tolerances must be non-negative");
  return metric.dual_norm(g - h) + metric.norm(y - x) +
         (1.0 + std::numbers::sqrt2 / 2.0) * (std::sqrt(delta) + std::sqrt(epsilon));
}

}  // namespace icbpg

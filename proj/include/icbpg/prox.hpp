#pragma once

// Inexact pre-conditioned proximal maps.
//
// For a query (x, g, delta, B, psi) the prox objective is
//   phi(z) = <g, z> + 0.5*||z - x||_B^2 + psi(z)
// and u belongs to the inexact prox set when phi(u) <= min phi + delta.
// Membership can be decided two ways: by the primal value gap against a
// reference minimum, or by exhibiting a certificate (u, delta', v) with
// ||v||_B^* <= sqrt(2(delta - delta')) and v - g - B(u - x) in the
// delta'-subdifferential of psi at u.

#include <cmath>
#include <cstdint>
#include <memory>
#include <optional>
#include <vector>

#include "icbpg/problem.hpp"
#include "icbpg/regularizer.hpp"

namespace icbpg {

struct ProxQuery {
  Vector x;
  Vector g;
  double delta = 0.0;
  std::shared_ptr<const BlockMetric> metric;
  std::shared_ptr<const Regularizer> psi;

  Index dimension() const { return x.size(); }
  /// Throws on inconsistent sizes, negative delta or missing pieces.
  void validate() const;
  /// The l1 regularizer, or UnsupportedRegularizer.
  const L1Norm& l1() const;
};

double prox_objective(const ProxQuery& query, const Vector& z);

/// Soft-thresholding: argmin <g,y> + (c/2)||y - x||^2 + lambda*||y||_1 = S_{lambda/c}(x - g/c).
Vector exact_prox_l1(const Vector& x, const Vector& g, double lambda, double c);

/// phi(u) - reference_min; u is in the delta-prox set iff this is <= delta.
double prox_value_gap(const ProxQuery& query, const Vector& u, double reference_min);

/// Absolute slack used when comparing a value gap with delta.
inline double membership_slack(double reference_min) { return 1e-9 * (1.0 + std::abs(reference_min)); }

struct ProxCertificate {
  Vector u;
  double delta_prime = 0.0;
  Vector v;
  /// v - g - B(u - x), claimed to lie in the delta'-subdifferential of psi at u.
  Vector subgrad_residual;
  double v_dual_norm = 0.0;
};

struct Certification {
  bool certified = false;
  /// Best attempt; valid certificate iff `certified`.
  ProxCertificate certificate;
  /// 0.5*(||v||_B^*)^2 + delta' of the best attempt: the smallest delta it certifies.
  double required_delta = 0.0;
  /// True when the closed-form delta' = 0 construction was not enough.
  bool used_positive_delta_prime = false;
};

struct CertifyOptions {
  /// Try the delta' > 0 construction when the delta' = 0 one fails.
  bool allow_positive_delta_prime = true;
  int max_iterations = 20000;
};

/// Builds a second-prox certificate for u (l1 regularizer only).
///
/// First the residual w = -(g + B(u - x)) is projected onto the exact
/// subdifferential of psi at u (delta' = 0). If that does not fit the budget,
/// s is chosen in the box [-lambda, lambda]^n to minimize
///   0.5*||s - w||_{B^{-1}}^2 + lambda*||u||_1 - <s, u>,
/// whose two terms are 0.5*(||v||^*)^2 and delta' for v = s - w. The minimum
/// of that problem equals the primal value gap of u, so the construction
/// certifies exactly the members of the delta-prox set.
Certification certify_second_prox(const ProxQuery& query, const Vector& u,
                                  const CertifyOptions& options = {});

/// Checks the certificate's norm bound and the subgradient inequality
///   <v - g - B(u - x), y - u> <= psi(y) - psi(u) + delta'
/// on every sample.
bool check_certificate(const ProxQuery& query, const ProxCertificate& cert,
                       const std::vector<Vector>& y_samples);

/// 10^3 Gaussian points around u with scale ||u - x||_B + 1, plus the exact
/// minimizer, the origin and the minimizer's coordinate-axis points.
std::vector<Vector> default_certificate_samples(const ProxQuery& query, const Vector& u,
                                                const Vector& exact_minimizer, std::uint64_t seed,
                                                int count = 1000);

/// psi(x) - min psi <= delta, i.e. 0 is a delta-subgradient at x.
bool delta_optimality_check(double psi_value_at_x, double psi_min, double delta);

struct DeltaSubgradientWitness {
  Vector x;
  Vector s;
  double delta = 0.0;
};

/// Sampled check of psi(y) >= psi(x) + <s, y - x> - delta.
bool holds_on_samples(const Regularizer& psi, const DeltaSubgradientWitness& w,
                      const std::vector<Vector>& y_samples, double slack = 1e-12);

/// Rockafellar-style approximate prox of lambda*||.||_1 (B = I, g = 0):
/// exists r in the subdifferential at u with ||u + r - x|| <= sqrt(2 delta).
bool rockafellar_membership(const Vector& x, double delta, const Vector& u, double lambda);

/// delta + sqrt(2 delta)*||e||^* + 0.5*(||e||^*)^2.
double gradient_error_embedding(double delta, double e_dual_norm);

/// ||g - h||_B^* + ||y - x||_B + (1 + sqrt(2)/2)(sqrt(delta) + sqrt(epsilon)).
double lipschitz_bound_rhs(const BlockMetric& metric, const Vector& x, const Vector& y,
                           const Vector& g, const Vector& h, double delta, double epsilon);

}  // namespace icbpg

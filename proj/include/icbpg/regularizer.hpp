#pragma once

#include <memory>
#include <string>

#include "icbpg/types.hpp"

namespace icbpg {

/// Proper closed convex function on R^n, evaluated by value only.
class Regularizer {
 public:
  virtual ~Regularizer() = default;
  virtual double value(const Vector& x) const = 0;
  virtual std::string name() const = 0;
};

/// weight * ||x||_1.
class L1Norm final : public Regularizer {
 public:
  explicit L1Norm(double weight);

  double value(const Vector& x) const override;
  std::string name() const override { return "l1"; }
  double weight() const { return weight_; }

  /// Closest point of the exact subdifferential at u to `target`, componentwise:
  /// weight*sign(u_j) where u_j != 0, clamp(target_j, -weight, weight) otherwise.
  Vector project_subdifferential(const Vector& u, const Vector& target) const;

  /// Exact membership test for the eps-subdifferential at x:
  /// ||s||_inf <= weight and weight*||x||_1 - <s, x> <= eps (up to `slack`).
  bool is_eps_subgradient(const Vector& x, const Vector& s, double eps, double slack = 0.0) const;

  /// Smallest eps with s in the eps-subdifferential at x, +inf when ||s||_inf > weight.
  double subgradient_slack(const Vector& x, const Vector& s) const;

 private:
  double weight_;
};

/// 0.5 * weight * ||x||^2. Smooth; used where a non-l1 regularizer is needed.
class HalfSquaredNorm final : public Regularizer {
 public:
  explicit HalfSquaredNorm(double weight = 1.0) : weight_(weight) {}
  double value(const Vector& x) const override { return 0.5 * weight_ * x.squaredNorm(); }
  std::string name() const override { return "half_squared_l2"; }

 private:
  double weight_;
};

std::shared_ptr<const L1Norm> make_l1(double weight);

}  // namespace icbpg

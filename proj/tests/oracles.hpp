#pragma once

// Reference computations used only by the tests. Everything here is dense and
// written independently of the library's solvers.

#include <Eigen/Dense>
#include <Eigen/Sparse>

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace oracle {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

inline double soft(double v, double t) { return v > t ? v - t : (v < -t ? v + t : 0.0); }

inline Vec soft(const Vec& v, double t) {
  Vec out(v.size());
  for (Eigen::Index j = 0; j < v.size(); ++j) out[j] = soft(v[j], t);
  return out;
}

/// Uses std::mt19937_64 so test data does not share a generator with the library.
struct Gen {
  explicit Gen(unsigned long long seed) : eng(seed) {}
  std::mt19937_64 eng;
  double normal() { return std::normal_distribution<double>()(eng); }
  double uniform(double lo = 0.0, double hi = 1.0) { return std::uniform_real_distribution<double>(lo, hi)(eng); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(eng); }
  Vec vec(Eigen::Index n, double scale = 1.0) {
    Vec v(n);
    for (auto& e : v) e = scale * normal();
    return v;
  }
  Mat mat(Eigen::Index r, Eigen::Index c) {
    Mat m(r, c);
    for (Eigen::Index j = 0; j < c; ++j)
      for (Eigen::Index i = 0; i < r; ++i) m(i, j) = normal();
    return m;
  }
  Mat spd(Eigen::Index n, double shift) {
    const Mat g = mat(n, n);
    Mat b = g * g.transpose() / static_cast<double>(n);
    b.diagonal().array() += shift;
    return b;
  }
};

/// argmin 0.5 z^T Q z + c^T z + lambda ||z||_1 by cyclic coordinate descent.
inline Vec cd_quadratic_l1(const Mat& Q, const Vec& c, double lambda, Vec z, int max_sweeps = 200000,
                           double tol = 1e-15) {
  Vec grad = Q * z + c;
  for (int sweep = 0; sweep < max_sweeps; ++sweep) {
    double change = 0.0;
    for (Eigen::Index j = 0; j < z.size(); ++j) {
      const double q = Q(j, j);
      const double nz = soft(z[j] - grad[j] / q, lambda / q);
      const double d = nz - z[j];
      if (d != 0.0) {
        grad += d * Q.col(j);
        z[j] = nz;
        change = std::max(change, std::abs(d));
      }
    }
    if (change <= tol * (1.0 + z.lpNorm<Eigen::Infinity>())) break;
  }
  return z;
}

/// Minimizer of <g, z> + 0.5 ||z - x||_B^2 + lambda ||z||_1.
inline Vec prox_cd(const Mat& B, const Vec& x, const Vec& g, double lambda) {
  return cd_quadratic_l1(B, g - B * x, lambda, x);
}

inline double prox_phi(const Mat& B, const Vec& x, const Vec& g, double lambda, const Vec& z) {
  const Vec d = z - x;
  return g.dot(z) + 0.5 * d.dot(B * d) + lambda * z.lpNorm<1>();
}

inline double lasso(const Mat& A, const Vec& b, double lambda, const Vec& y) {
  return 0.5 * (A * y - b).squaredNorm() + lambda * y.lpNorm<1>();
}

/// LASSO minimizer for n <= 3 by enumerating every sign pattern in {-1, 0, 1}^n.
inline Vec sign_pattern_lasso(const Mat& A, const Vec& b, double lambda) {
  const Eigen::Index n = A.cols();
  int patterns = 1;
  for (Eigen::Index j = 0; j < n; ++j) patterns *= 3;
  Vec best = Vec::Zero(n);
  double best_val = lasso(A, b, lambda, best);
  for (int code = 0; code < patterns; ++code) {
    std::vector<int> sign(static_cast<std::size_t>(n));
    std::vector<Eigen::Index> support;
    int c = code;
    for (Eigen::Index j = 0; j < n; ++j) {
      sign[static_cast<std::size_t>(j)] = c % 3 - 1;
      c /= 3;
      if (sign[static_cast<std::size_t>(j)] != 0) support.push_back(j);
    }
    if (support.empty()) continue;
    const auto k = static_cast<Eigen::Index>(support.size());
    Mat As(A.rows(), k);
    Vec s(k);
    for (Eigen::Index a = 0; a < k; ++a) {
      As.col(a) = A.col(support[static_cast<std::size_t>(a)]);
      s[a] = sign[static_cast<std::size_t>(support[static_cast<std::size_t>(a)])];
    }
    const Mat G = As.transpose() * As;
    Eigen::FullPivLU<Mat> lu(G);
    if (!lu.isInvertible()) continue;
    const Vec ys = lu.solve(As.transpose() * b - lambda * s);
    bool consistent = true;
    for (Eigen::Index a = 0; a < k; ++a) consistent = consistent && ys[a] * s[a] > 0.0;
    if (!consistent) continue;
    Vec y = Vec::Zero(n);
    for (Eigen::Index a = 0; a < k; ++a) y[support[static_cast<std::size_t>(a)]] = ys[a];
    const double v = lasso(A, b, lambda, y);
    if (v < best_val) {
      best_val = v;
      best = y;
    }
  }
  return best;
}

/// Minimum of f over a (steps+1)^2 grid on [c - h, c + h]^2, refined `levels` times.
inline double grid_min_2d(const std::function<double(const Vec&)>& f, Vec center, double h, int steps = 200,
                          int levels = 6) {
  double best = std::numeric_limits<double>::infinity();
  for (int level = 0; level < levels; ++level) {
    Vec arg = center;
    for (int a = 0; a <= steps; ++a) {
      for (int b = 0; b <= steps; ++b) {
        Vec z(2);
        z << center[0] - h + 2.0 * h * a / steps, center[1] - h + 2.0 * h * b / steps;
        const double v = f(z);
        if (v < best) {
          best = v;
          arg = z;
        }
      }
    }
    center = arg;
    h *= 4.0 / steps;
  }
  return best;
}

/// Proximal gradient x <- S_{lambda/L}(x - A^T(Ax - b)/L), `iters` steps; returns
/// the objective after every step (entry 0 is the start).
inline std::vector<double> ista(const Mat& A, const Vec& b, double lambda, double L, Vec x, int iters) {
  std::vector<double> out{lasso(A, b, lambda, x)};
  for (int k = 0; k < iters; ++k) {
    x = soft(x - A.transpose() * (A * x - b) / L, lambda / L);
    out.push_back(lasso(A, b, lambda, x));
  }
  return out;
}

inline double max_eigenvalue(const Mat& M) {
  const Eigen::SelfAdjointEigenSolver<Mat> eig(0.5 * (M + M.transpose()), Eigen::EigenvaluesOnly);
  return eig.eigenvalues().maxCoeff();
}

inline Vec central_difference(const std::function<double(const Vec&)>& f, const Vec& x, double h = 1e-5) {
  Vec g(x.size());
  for (Eigen::Index j = 0; j < x.size(); ++j) {
    Vec a = x, b = x;
    a[j] += h;
    b[j] -= h;
    g[j] = (f(a) - f(b)) / (2.0 * h);
  }
  return g;
}

inline Eigen::SparseMatrix<double, Eigen::ColMajor, int> sparse(const Mat& m) {
  return m.sparseView();
}

}  // namespace oracle

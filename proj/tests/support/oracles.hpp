#pragma once

// Independent reference computations for the tests. Nothing here calls the
// library's solvers.

#include <cmath>
#include <stdexcept>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Gaussian elimination with partial pivoting on a dense copy, carried out in
/// long double so the reference stays tighter than the solver under test on
/// badly conditioned systems.
inline Eigen::MatrixXd dense_solve(const Eigen::MatrixXd& a_in, const Eigen::MatrixXd& b_in) {
  using Mat = Eigen::Matrix<long double, Eigen::Dynamic, Eigen::Dynamic>;
  Mat a = a_in.cast<long double>();
  Mat b = b_in.cast<long double>();
  const Eigen::Index n = a.rows();
  for (Eigen::Index k = 0; k < n; ++k) {
    Eigen::Index p = k;
    for (Eigen::Index i = k + 1; i < n; ++i)
      if (std::abs(a(i, k)) > std::abs(a(p, k))) p = i;
    if (a(p, k) == 0.0L) throw std::runtime_error("dense_solve: singular");
    a.row(k).swap(a.row(p));
    b.row(k).swap(b.row(p));
    for (Eigen::Index i = k + 1; i < n; ++i) {
      const long double m = a(i, k) / a(k, k);
      a.row(i).tail(n - k) -= m * a.row(k).tail(n - k);
      b.row(i) -= m * b.row(k);
    }
  }
  for (Eigen::Index k = n; k-- > 0;) {
    for (Eigen::Index j = k + 1; j < n; ++j) b.row(k) -= a(k, j) * b.row(j);
    b.row(k) /= a(k, k);
  }
  return b.cast<double>();
}

inline Eigen::VectorXd dense_solve(const Eigen::MatrixXd& a, const Eigen::VectorXd& b) {
  return dense_solve(a, Eigen::MatrixXd(b)).col(0);
}

/// Relative max-norm distance.
inline double rel_error(const Eigen::MatrixXd& got, const Eigen::MatrixXd& want) {
  const double scale = std::max(want.cwiseAbs().maxCoeff(), 1e-300);
  return (got - want).cwiseAbs().maxCoeff() / scale;
}

/// Central difference of a scalar function of one variable.
template <class F>
double central_difference(F&& f, double x, double h) {
  return (f(x + h) - f(x - h)) / (2 * h);
}

/// Roots of the degree-k Legendre polynomial on (0, 1) by bisection on a fine
/// sign-change scan of the three-term recurrence.
inline std::vector<double> legendre_roots_unit(int k) {
  auto p = [k](double x) {
    double p0 = 1.0, p1 = x;
    if (k == 0) return p0;
    for (int n = 1; n < k; ++n) {
      const double p2 = ((2 * n + 1) * x * p1 - n * p0) / (n + 1);
      p0 = p1;
      p1 = p2;
    }
    return p1;
  };
  std::vector<double> roots;
  const int scan = 20000;
  for (int i = 0; i < scan; ++i) {
    double a = -1.0 + 2.0 * i / scan, b = -1.0 + 2.0 * (i + 1) / scan;
    if (p(b) == 0.0 || p(a) * p(b) > 0) continue;
    for (int it = 0; it < 200; ++it) {
      const double m = 0.5 * (a + b);
      (p(a) * p(m) <= 0 ? b : a) = m;
    }
    roots.push_back(0.5 * (0.5 * (a + b) + 1.0));
  }
  return roots;
}

}  // namespace oracle

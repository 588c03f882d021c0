#include "wfdelay/chebyshev.hpp"

#include <cmath>
#include <numbers>

#include <Eigen/QR>

namespace wfdelay::cheb {

std::vector<double> lobatto_nodes(int n, double a, double b) {
  std::vector<double> t(static_cast<std::size_t>(n) + 1);
  if (n == 0) {
    t[0] = 0.5 * (a + b);
    return t;
  }
  for (int k = 0; k <= n; ++k) {
    // sin form is symmetric and exact at the ends and the middle
    const double x = std::sin(std::numbers::pi * (2.0 * k - n) / (2.0 * n));
    t[static_cast<std::size_t>(k)] = from_unit(x, a, b);
  }
  t.front() = a;
  t.back() = b;
  return t;
}

Eigen::MatrixXd vandermonde(const std::vector<double>& x, int degree) {
  Eigen::MatrixXd v(static_cast<Eigen::Index>(x.size()), degree + 1);
  for (std::size_t i = 0; i < x.size(); ++i) {
    const auto r = static_cast<Eigen::Index>(i);
    v(r, 0) = 1.0;
    if (degree >= 1) v(r, 1) = x[i];
    for (int k = 2; k <= degree; ++k) v(r, k) = 2.0 * x[i] * v(r, k - 1) - v(r, k - 2);
  }
  return v;
}

Eigen::MatrixXd derivative(const Eigen::MatrixXd& c) {
  const Eigen::Index n = c.cols() - 1;  // degree
  if (n <= 0) return Eigen::MatrixXd::Zero(c.rows(), 1);
  Eigen::MatrixXd d = Eigen::MatrixXd::Zero(c.rows(), n);
  for (Eigen::Index r = 0; r < c.rows(); ++r) {
    double dk1 = 0.0, dk2 = 0.0;  // d_{k+1}, d_{k+2}
    for (Eigen::Index k = n; k >= 1; --k) {
      const double dk = dk2 + 2.0 * static_cast<double>(k) * c(r, k);
      d(r, k - 1) = dk;
      dk2 = dk1;
      dk1 = dk;
    }
    d(r, 0) *= 0.5;
  }
  return d;
}

double clenshaw(const Eigen::VectorXd& c, double x) {
  double b1 = 0.0, b2 = 0.0;
  for (Eigen::Index k = c.size() - 1; k >= 1; --k) {
    const double b0 = 2.0 * x * b1 - b2 + c(k);
    b2 = b1;
    b1 = b0;
  }
  return x * b1 - b2 + c(0);
}

Eigen::MatrixXd fit(const std::vector<double>& x, const Eigen::MatrixXd& values_by_row, int degree) {
  const Eigen::MatrixXd v = vandermonde(x, degree);
  // rows of the result are components, columns are coefficients
  Eigen::MatrixXd sol = v.colPivHouseholderQr().solve(values_by_row.transpose());
  return sol.transpose();
}

}  // namespace wfdelay::cheb

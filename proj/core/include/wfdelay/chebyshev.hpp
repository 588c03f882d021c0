#pragma once

#include <vector>

#include <Eigen/Core>

namespace wfdelay::cheb {

// Chebyshev-Lobatto points cos(pi k / n), k = 0..n, mapped to [a, b] in increasing order.
std::vector<double> lobatto_nodes(int n, double a, double b);

inline double to_unit(double t, double a, double b) { return (2.0 * t - a - b) / (b - a); }
inline double from_unit(double x, double a, double b) { return 0.5 * (a + b) + 0.5 * (b - a) * x; }

// Rows are T_0..T_degree evaluated at each x.
Eigen::MatrixXd vandermonde(const std::vector<double>& x, int degree);

// Coefficients of d/dx in the Chebyshev basis; one fewer column (at least one).
Eigen::MatrixXd derivative(const Eigen::MatrixXd& c);

// Clenshaw summation, one row of c per output component.
template <class Out>
void clenshaw(const Eigen::MatrixXd& c, double x, Out& out) {
  const auto n = c.cols();
  const auto rows = c.rows();
  for (Eigen::Index r = 0; r < rows; ++r) {
    double b1 = 0.0, b2 = 0.0;
    for (Eigen::Index k = n - 1; k >= 1; --k) {
      const double b0 = 2.0 * x * b1 - b2 + c(r, k);
      b2 = b1;
      b1 = b0;
    }
    out[r] = x * b1 - b2 + c(r, 0);
  }
}

double clenshaw(const Eigen::VectorXd& c, double x);

// Least-squares (or exact, if square) Chebyshev fit of values at unit-domain points.
Eigen::MatrixXd fit(const std::vector<double>& x, const Eigen::MatrixXd& values_by_row, int degree);

}  // namespace wfdelay::cheb

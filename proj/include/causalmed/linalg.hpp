#pragma once

#include <Eigen/Dense>

#include <cstddef>

namespace causalmed::linalg {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Singular values of a, descending. Tall matrices are reduced to their
// triangular QR factor first, so the cost is O(rows * cols^2).
Vector singular_values(const Matrix& a);

// Rank-decision threshold: max(rows, cols) * machine epsilon * sigma_max.
double rank_tolerance(std::size_t rows, std::size_t cols, double sigma_max);

// Number of singular values strictly above the tolerance.
std::size_t numerical_rank(const Vector& sigma, double tolerance);

struct LeastSquares {
  Vector solution;
  double condition = 0.0;  // sigma_max / sigma_min of the coefficient matrix
};

// Minimum-norm-free least squares via Householder QR. The matrix must have
// full column rank under rank_tolerance; otherwise IdentificationError.
LeastSquares solve_least_squares(const Matrix& a, const Vector& b);

}  // namespace causalmed::linalg

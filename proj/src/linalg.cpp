#include "causalmed/linalg.hpp"

#include <algorithm>
#include <limits>

#include "causalmed/error.hpp"

namespace causalmed::linalg {

Vector singular_values(const Matrix& a) {
  if (a.rows() == 0 || a.cols() == 0) {
    return Vector();
  }
  if (a.rows() > a.cols()) {
    // sigma(A) = sigma(R) for A = QR with orthonormal Q.
    Eigen::HouseholderQR<Matrix> qr(a);
    Matrix r = qr.matrixQR()
                   .topRows(a.cols())
                   .template triangularView<Eigen::Upper>();
    Eigen::JacobiSVD<Matrix> svd(r);
    return svd.singularValues();
  }
  Eigen::JacobiSVD<Matrix> svd(a);
  return svd.singularValues();
}

double rank_tolerance(std::size_t rows, std::size_t cols, double sigma_max) {
  const double dim = static_cast<double>(std::max(rows, cols));
  return dim * std::numeric_limits<double>::epsilon() * sigma_max;
}

std::size_t numerical_rank(const Vector& sigma, double tolerance) {
  std::size_t rank = 0;
  for (Eigen::Index i = 0; i < sigma.size(); ++i) {
    if (sigma[i] > tolerance) {
      ++rank;
    }
  }
  return rank;
}

LeastSquares solve_least_squares(const Matrix& a, const Vector& b) {
  if (a.rows() != b.size()) {
    throw ConfigError("least squares: matrix has " + std::to_string(a.rows()) +
                      " rows but right-hand side has " +
                      std::to_string(b.size()) + " entries");
  }
  if (a.rows() < a.cols()) {
    throw IdentificationError(
        "least squares: fewer rows than columns, system underdetermined");
  }
  const Vector sigma = singular_values(a);
  const double tol = rank_tolerance(static_cast<std::size_t>(a.rows()),
                                    static_cast<std::size_t>(a.cols()),
                                    sigma.size() > 0 ? sigma[0] : 0.0);
  if (numerical_rank(sigma, tol) < static_cast<std::size_t>(a.cols())) {
    throw IdentificationError("least squares: coefficient matrix is rank deficient");
  }
  LeastSquares out;
  Eigen::HouseholderQR<Matrix> qr(a);
  out.solution = qr.solve(b);
  out.condition = sigma[0] / sigma[sigma.size() - 1];
  return out;
}

}  // namespace causalmed::linalg

#include "mregen/numerics.hpp"

#include <Eigen/Dense>
#include <Eigen/SVD>

namespace mregen {

std::optional<Vector> lu_solve(const Matrix& A, const Vector& b) {
  if (A.rows() != A.cols() || A.rows() != b.size())
    throw std::invalid_argument("lu_solve needs a square system");
  Eigen::PartialPivLU<Matrix> lu(A);
  const double largest = A.cwiseAbs().maxCoeff();
  const double pivot_min = lu.matrixLU().diagonal().cwiseAbs().minCoeff();
  if (largest == 0.0 || pivot_min < kSingularPivotRatio * largest)
    return std::nullopt;
  return lu.solve(b);
}

NewtonReport newton_correct(const SystemEval& F, const JacobianEval& J,
                            const Vector& x0, double tol, int max_iter) {
  NewtonReport report;
  report.final_point = x0;
  Vector r = F(x0);
  report.residual_norm = r.cwiseAbs().maxCoeff();
  for (int it = 0; it < max_iter && report.residual_norm > tol; ++it) {
    auto dx = lu_solve(J(report.final_point), r);
    if (!dx) {
      report.singular_jacobian = true;
      break;
    }
    report.final_point -= *dx;
    r = F(report.final_point);
    report.residual_norm = r.cwiseAbs().maxCoeff();
    report.iterations = it + 1;
  }
  report.converged = report.residual_norm <= tol;
  return report;
}

double smallest_singular_value(const Matrix& A) {
  return extreme_singular_values(A).second;
}

std::pair<double, double> extreme_singular_values(const Matrix& A) {
  Eigen::JacobiSVD<Matrix> svd(A);
  const auto& s = svd.singularValues();
  if (s.size() == 0) return {0.0, 0.0};
  return {s[0], s[s.size() - 1]};
}

}  // namespace mregen

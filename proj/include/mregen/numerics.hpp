#pragma once

#include <functional>
#include <optional>

#include <Eigen/Core>

#include "mregen/polysys.hpp"

namespace mregen {

using SystemEval = std::function<Vector(const Vector&)>;
using JacobianEval = std::function<Matrix(const Vector&)>;

// A pivot below this fraction of the largest entry counts as singular.
inline constexpr double kSingularPivotRatio = 1e-14;
// Classification threshold: an endpoint is singular when
// sigma_min(J) < kSingularSigmaRatio * sigma_max(J).
inline constexpr double kSingularSigmaRatio = 1e-8;

struct NewtonReport {
  Vector final_point;
  double residual_norm = 0.0;  // infinity norm
  int iterations = 0;
  bool converged = false;
  bool singular_jacobian = false;
};

// Partial-pivoted LU solve; nullopt when a pivot is singular to working
// precision.
std::optional<Vector> lu_solve(const Matrix& A, const Vector& b);

// Newton iteration x <- x - J(x)^{-1} F(x) until ||F||_inf <= tol or
// max_iter. A singular Jacobian stops the iteration with the flag set.
NewtonReport newton_correct(const SystemEval& F, const JacobianEval& J,
                            const Vector& x0, double tol, int max_iter);

double smallest_singular_value(const Matrix& A);

// (sigma_max, sigma_min) from one decomposition.
std::pair<double, double> extreme_singular_values(const Matrix& A);

}  // namespace mregen

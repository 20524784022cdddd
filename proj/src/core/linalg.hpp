#pragma once

#include <Eigen/Dense>

namespace sgsde {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

// Largest real part over the eigenvalues of a square matrix.
double spectral_abscissa(const Matrix& a);

// Fundamental matrix e^{At}, t >= 0.
Matrix matrix_exponential(const Matrix& a, double t);

// Drift quadrature weight Psi(t) = integral_0^t e^{As} ds, computed exactly
// from the exponential of the augmented block matrix [[A, I], [0, 0]].
Matrix drift_integral(const Matrix& a, double t);

// Max-abs-entry norm used throughout (the norm of condition on the
// fundamental matrix bound).
double max_abs(const Matrix& m);

// Max row sum of absolute entries (operator norm for the max vector norm).
double max_row_sum(const Matrix& m);

// Solves A X + X A^T + Q = 0 for symmetric Q via Kronecker vectorization.
// Requires A stable; throws NumericError naming the offending eigenvalue.
Matrix solve_lyapunov(const Matrix& a, const Matrix& q);

}  // namespace sgsde

#include "core/linalg.hpp"

#include <cmath>
#include <complex>
#include <sstream>

#include <unsupported/Eigen/MatrixFunctions>

#include "core/errors.hpp"

namespace sgsde {

double spectral_abscissa(const Matrix& a) {
    if (a.rows() != a.cols()) {
        throw ValidationError("spectral_abscissa: matrix must be square");
    }
    if (!a.allFinite()) {
        throw ValidationError("spectral_abscissa: matrix has non-finite entries");
    }
    if (a.rows() == 1) return a(0, 0);
    Eigen::EigenSolver<Matrix> es(a, /*computeEigenvectors=*/false);
    if (es.info() != Eigen::Success) {
        std::ostringstream os;
        os << "eigenvalue iteration failed to converge for matrix\n" << a;
        throw NumericError(os.str());
    }
    return es.eigenvalues().real().maxCoeff();
}

Matrix matrix_exponential(const Matrix& a, double t) {
    if (a.rows() == 1 && a.cols() == 1) {
        Matrix r(1, 1);
        r(0, 0) = std::exp(a(0, 0) * t);
        return r;
    }
    return (a * t).exp();
}

Matrix drift_integral(const Matrix& a, double t) {
    const Eigen::Index d = a.rows();
    Matrix aug = Matrix::Zero(2 * d, 2 * d);
    aug.topLeftCorner(d, d) = a;
    aug.topRightCorner(d, d) = Matrix::Identity(d, d);
    const Matrix e = (aug * t).exp();
    return e.topRightCorner(d, d);
}

double max_abs(const Matrix& m) {
    return m.cwiseAbs().maxCoeff();
}

double max_row_sum(const Matrix& m) {
    return m.cwiseAbs().rowwise().sum().maxCoeff();
}

Matrix solve_lyapunov(const Matrix& a, const Matrix& q) {
    const Eigen::Index d = a.rows();
    Eigen::EigenSolver<Matrix> es(a, false);
    for (Eigen::Index i = 0; i < d; ++i) {
        const std::complex<double> mu = es.eigenvalues()(i);
        if (mu.real() >= 0.0) {
            std::ostringstream os;
            os << "Lyapunov equation has no solution: eigenvalue " << mu
               << " of A has nonnegative real part";
            throw NumericError(os.str());
        }
    }
    // vec(AX + XA^T) = (I (x) A + A (x) I) vec(X)
    Matrix k = Matrix::Zero(d * d, d * d);
    const Matrix id = Matrix::Identity(d, d);
    for (Eigen::Index i = 0; i < d; ++i) {
        for (Eigen::Index j = 0; j < d; ++j) {
            for (Eigen::Index p = 0; p < d; ++p) {
                for (Eigen::Index r = 0; r < d; ++r) {
                    // block (i,j) of I (x) A is delta_ij * A; of A (x) I is a_ij * I
                    k(i * d + p, j * d + r) = id(i, j) * a(p, r) + a(i, j) * id(p, r);
                }
            }
        }
    }
    Vector rhs(d * d);
    for (Eigen::Index j = 0; j < d; ++j) {
        rhs.segment(j * d, d) = -q.col(j);
    }
    const Vector x = k.colPivHouseholderQr().solve(rhs);
    Matrix sigma(d, d);
    for (Eigen::Index j = 0; j < d; ++j) {
        sigma.col(j) = x.segment(j * d, d);
    }
    // Symmetrize away roundoff; the exact solution is symmetric for symmetric Q.
    return 0.5 * (sigma + sigma.transpose());
}

}  // namespace sgsde

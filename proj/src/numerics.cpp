#include "rhsradar/numerics.hpp"

#include "rhsradar/errors.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace rhsradar {

namespace {

void check_square_finite(const ComplexMatrix& m, const char* who) {
    if (m.rows() != m.cols()) {
        throw std::invalid_argument(std::string(who) + ": matrix must be square");
    }
    if (!m.allFinite()) {
        throw std::invalid_argument(std::string(who) + ": matrix has non-finite entries");
    }
}

// Rotates each column so its first component of modulus > 1e-12 lands on the
// positive real axis. Eigenvectors are unique only up to phase; pinning it
// keeps results reproducible.
void fix_column_phases(ComplexMatrix& vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
            const double mag = std::abs(vectors(r, c));
            if (mag > 1e-12) {
                vectors.col(c) *= std::conj(vectors(r, c)) / mag;
                break;
            }
        }
    }
}

void fix_column_signs(RealMatrix& vectors) {
    for (Eigen::Index c = 0; c < vectors.cols(); ++c) {
        for (Eigen::Index r = 0; r < vectors.rows(); ++r) {
            if (std::abs(vectors(r, c)) > 1e-12) {
                if (vectors(r, c) < 0.0) vectors.col(c) = -vectors.col(c);
                break;
            }
        }
    }
}

} // namespace

HermitianEig eigh(const ComplexMatrix& matrix) {
    check_square_finite(matrix, "eigh");
    const double norm = matrix.norm();
    const double asym = (matrix - matrix.adjoint()).norm();
    if (asym > 1e-8 * std::max(norm, 1e-300)) {
        throw std::invalid_argument("eigh: matrix is not Hermitian within tolerance");
    }
    const ComplexMatrix sym = 0.5 * (matrix + matrix.adjoint());

    Eigen::SelfAdjointEigenSolver<ComplexMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigh: eigendecomposition failed to converge");
    }

    HermitianEig out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    fix_column_phases(out.vectors);
    return out;
}

SymmetricEig eigh_real(const RealMatrix& matrix) {
    if (matrix.rows() != matrix.cols()) {
        throw std::invalid_argument("eigh_real: matrix must be square");
    }
    if (!matrix.allFinite()) {
        throw std::invalid_argument("eigh_real: matrix has non-finite entries");
    }
    const RealMatrix sym = 0.5 * (matrix + matrix.transpose());
    Eigen::SelfAdjointEigenSolver<RealMatrix> solver(sym);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("eigh_real: eigendecomposition failed to converge");
    }
    SymmetricEig out;
    out.values = solver.eigenvalues().reverse();
    out.vectors = solver.eigenvectors().rowwise().reverse();
    fix_column_signs(out.vectors);
    return out;
}

ComplexMatrix inv_sqrt_psd(const ComplexMatrix& matrix, double rel_tol) {
    HermitianEig eig = eigh(matrix);
    const double lambda_max = eig.values.size() > 0 ? std::max(eig.values(0), 0.0) : 0.0;
    const double negative_floor = -1e-10 * std::max(lambda_max, 1e-300);

    RealVector mapped = RealVector::Zero(eig.values.size());
    for (Eigen::Index i = 0; i < eig.values.size(); ++i) {
        const double lambda = eig.values(i);
        if (lambda < negative_floor) {
            throw NumericalError("inv_sqrt_psd: matrix has a negative eigenvalue beyond tolerance");
        }
        if (lambda > rel_tol * lambda_max && lambda > 0.0) {
            mapped(i) = 1.0 / std::sqrt(lambda);
        }
    }
    return eig.vectors * mapped.asDiagonal() * eig.vectors.adjoint();
}

ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b) {
    if (!a.allFinite() || !b.allFinite()) {
        throw std::invalid_argument("kron: non-finite entries");
    }
    ComplexMatrix out(a.rows() * b.rows(), a.cols() * b.cols());
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
        for (Eigen::Index j = 0; j < a.cols(); ++j) {
            out.block(i * b.rows(), j * b.cols(), b.rows(), b.cols()) = a(i, j) * b;
        }
    }
    return out;
}

} // namespace rhsradar

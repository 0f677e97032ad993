#ifndef RHSRADAR_NUMERICS_HPP
#define RHSRADAR_NUMERICS_HPP

#include <Eigen/Dense>
#include <complex>

namespace rhsradar {

using Complex = std::complex<double>;
using ComplexMatrix = Eigen::MatrixXcd;
using ComplexVector = Eigen::VectorXcd;
using RealMatrix = Eigen::MatrixXd;
using RealVector = Eigen::VectorXd;

/**
 * Eigendecomposition of a Hermitian matrix.
 *
 * Eigenvalues are real and sorted descending; eigenvectors form a unitary
 * column set with a fixed phase convention (the first component of modulus
 * above 1e-12 is rotated onto the positive real axis) so repeated runs and
 * downstream solvers see identical bases.
 */
struct HermitianEig {
    RealVector values;      // descending
    ComplexMatrix vectors;  // orthonormal columns, values(i) <-> vectors.col(i)
};

/// Decomposes a Hermitian matrix. The input must be square, finite, and
/// Hermitian within 1e-8 relative asymmetry; it is symmetrized before the
/// solve. Throws std::invalid_argument on contract violations.
HermitianEig eigh(const ComplexMatrix& matrix);

/// Real symmetric variant with the same ordering and sign conventions.
struct SymmetricEig {
    RealVector values;   // descending
    RealMatrix vectors;  // orthonormal columns
};
SymmetricEig eigh_real(const RealMatrix& matrix);

/**
 * Inverse square root of a Hermitian PSD matrix.
 *
 * Eigenvalues above rel_tol * lambda_max map to lambda^{-1/2}; smaller ones
 * map to zero (pseudo-inverse branch). Eigenvalues in
 * [-1e-10 * lambda_max, 0) are clamped to zero; anything more negative is a
 * genuinely non-PSD input and raises NumericalError.
 */
ComplexMatrix inv_sqrt_psd(const ComplexMatrix& matrix, double rel_tol = 1e-10);

/// Kronecker product, shape (rows_a * rows_b) x (cols_a * cols_b).
ComplexMatrix kron(const ComplexMatrix& a, const ComplexMatrix& b);

} // namespace rhsradar

#endif

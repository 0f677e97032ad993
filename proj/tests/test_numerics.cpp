#include "doctest.h"

#include "rhsradar/errors.hpp"
#include "rhsradar/numerics.hpp"
#include "rhsradar/rng.hpp"

#include <cmath>
#include <complex>

using namespace rhsradar;

namespace {

ComplexMatrix random_complex(Eigen::Index rows, Eigen::Index cols, Rng& rng) {
    ComplexMatrix m(rows, cols);
    for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
            m(i, j) = rng.complex_normal(1.0);
    return m;
}

} // namespace

TEST_SUITE("numerics") {

TEST_CASE("hermitian eigendecomposition reconstructs the matrix") {
    Rng rng(42);
    const ComplexMatrix g = random_complex(6, 6, rng);
    const ComplexMatrix h = 0.5 * (g + g.adjoint());

    const HermitianEig eig = eigh(h);
    REQUIRE(eig.values.size() == 6);

    // Descending eigenvalues.
    for (Eigen::Index i = 1; i < 6; ++i)
        CHECK(eig.values(i - 1) >= eig.values(i));

    // Unitary basis and exact reconstruction.
    CHECK(((eig.vectors.adjoint() * eig.vectors) - ComplexMatrix::Identity(6, 6)).norm() <
          1e-10);
    const ComplexMatrix rebuilt =
        eig.vectors * eig.values.asDiagonal() * eig.vectors.adjoint();
    CHECK((rebuilt - h).norm() < 1e-10 * h.norm());

    // Phase convention: the first component of significant size is positive real.
    for (Eigen::Index j = 0; j < 6; ++j) {
        Eigen::Index lead = 0;
        const double peak = eig.vectors.col(j).cwiseAbs().maxCoeff();
        while (std::abs(eig.vectors(lead, j)) < 1e-8 * peak)
            ++lead;
        CHECK(std::abs(eig.vectors(lead, j).imag()) < 1e-12);
        CHECK(eig.vectors(lead, j).real() > 0.0);
    }
}

TEST_CASE("hermitian eigendecomposition on a known 2x2 matrix") {
    ComplexMatrix m(2, 2);
    m << Complex(0.0, 0.0), Complex(0.0, -1.0), Complex(0.0, 1.0), Complex(0.0, 0.0);
    const HermitianEig eig = eigh(m);
    CHECK(eig.values(0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(eig.values(1) == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("non-hermitian input is rejected") {
    ComplexMatrix m(2, 2);
    m << Complex(1.0, 0.0), Complex(2.0, 0.0), Complex(0.0, 0.0), Complex(1.0, 0.0);
    CHECK_THROWS_AS((void)eigh(m), std::invalid_argument);
}

TEST_CASE("real symmetric eigendecomposition matches the complex path") {
    Rng rng(7);
    RealMatrix g(5, 5);
    for (Eigen::Index j = 0; j < 5; ++j)
        for (Eigen::Index i = 0; i < 5; ++i)
            g(i, j) = rng.normal();
    const RealMatrix s = 0.5 * (g + g.transpose());

    const SymmetricEig real_eig = eigh_real(s);
    const HermitianEig complex_eig = eigh(s.cast<Complex>());
    CHECK((real_eig.values - complex_eig.values).norm() < 1e-10);
    const RealMatrix rebuilt =
        real_eig.vectors * real_eig.values.asDiagonal() * real_eig.vectors.transpose();
    CHECK((rebuilt - s).norm() < 1e-10 * s.norm());
}

TEST_CASE("inverse square root inverts positive definite matrices") {
    Rng rng(3);
    const ComplexMatrix g = random_complex(5, 5, rng);
    const ComplexMatrix m =
        (g * g.adjoint() + ComplexMatrix::Identity(5, 5)).eval();
    const ComplexMatrix w = inv_sqrt_psd(m);
    CHECK((w * m * w - ComplexMatrix::Identity(5, 5)).norm() < 1e-9);
}

TEST_CASE("inverse square root pseudo-inverts singular matrices") {
    Rng rng(4);
    ComplexVector v(4);
    for (Eigen::Index i = 0; i < 4; ++i)
        v(i) = rng.complex_normal(1.0);
    const ComplexMatrix m = v * v.adjoint();
    const ComplexMatrix w = inv_sqrt_psd(m);
    // W M W is the orthogonal projector onto span(v).
    const ComplexMatrix projector = v * v.adjoint() / v.squaredNorm();
    CHECK((w * m * w - projector).norm() < 1e-9);
}

TEST_CASE("inverse square root rejects indefinite matrices") {
    ComplexMatrix m = ComplexMatrix::Identity(3, 3);
    m(2, 2) = Complex(-1.0, 0.0);
    CHECK_THROWS_AS((void)inv_sqrt_psd(m), NumericalError);
}

TEST_CASE("kronecker product matches the definition") {
    Rng rng(5);
    const ComplexMatrix a = random_complex(2, 3, rng);
    const ComplexMatrix b = random_complex(3, 2, rng);
    const ComplexMatrix k = kron(a, b);
    REQUIRE(k.rows() == 6);
    REQUIRE(k.cols() == 6);
    for (Eigen::Index i = 0; i < k.rows(); ++i)
        for (Eigen::Index j = 0; j < k.cols(); ++j) {
            const Complex expected = a(i / 3, j / 2) * b(i % 3, j % 2);
            CHECK(std::abs(k(i, j) - expected) < 1e-14);
        }

    // Identity on the left yields a block diagonal.
    const ComplexMatrix blocks = kron(ComplexMatrix::Identity(2, 2), b);
    CHECK((blocks.block(0, 0, 3, 2) - b).norm() == 0.0);
    CHECK((blocks.block(3, 2, 3, 2) - b).norm() == 0.0);
    CHECK(blocks.block(0, 2, 3, 2).norm() == 0.0);
}

TEST_CASE("random source is deterministic") {
    Rng a(123), b(123);
    for (int i = 0; i < 100; ++i)
        CHECK(a.next_u64() == b.next_u64());

    Rng c(123), d(124);
    bool any_different = false;
    for (int i = 0; i < 10; ++i)
        any_different = any_different || c.next_u64() != d.next_u64();
    CHECK(any_different);
}

TEST_CASE("derived streams are distinct and reproducible") {
    const std::uint64_t master = 99;
    CHECK(Rng::derive(master, 0) == Rng::derive(master, 0));
    CHECK(Rng::derive(master, 0) != Rng::derive(master, 1));
    CHECK(Rng::derive(master, 1) != Rng::derive(master + 1, 1));
}

TEST_CASE("uniform draws live in the half-open unit interval") {
    Rng rng(8);
    for (int i = 0; i < 10000; ++i) {
        const double u = rng.uniform();
        CHECK(u >= 0.0);
        CHECK(u < 1.0);
    }
}

TEST_CASE("complex normal draws have the requested second moment") {
    Rng rng(9);
    const int n = 20000;
    const double variance = 2.0;
    Complex mean(0.0, 0.0);
    Complex pseudo(0.0, 0.0);
    double power = 0.0;
    for (int i = 0; i < n; ++i) {
        const Complex z = rng.complex_normal(variance);
        mean += z;
        pseudo += z * z;
        power += std::norm(z);
    }
    mean /= static_cast<double>(n);
    pseudo /= static_cast<double>(n);
    power /= static_cast<double>(n);
    CHECK(std::abs(mean) < 0.05);
    CHECK(power == doctest::Approx(variance).epsilon(0.05));
    // Circular symmetry: the pseudo-variance E[z^2] vanishes.
    CHECK(std::abs(pseudo) < 0.08);
}

} // TEST_SUITE

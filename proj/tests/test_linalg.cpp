#include "doctest.h"

#include "strain_cascade/errors.hpp"
#include "strain_cascade/linalg.hpp"
#include "support/oracles.hpp"
#include "support/random_instances.hpp"

#include <cmath>

using namespace strain_cascade;
using testing_support::log_uniform;
using testing_support::Rng;

namespace
{

std::vector<std::vector<double>> rows_of(const SquareMatrix& M)
{
    std::vector<std::vector<double>> rows(M.order(), std::vector<double>(M.order()));
    for (std::size_t i = 0; i < M.order(); ++i) {
        for (std::size_t j = 0; j < M.order(); ++j) {
            rows[i][j] = M(i, j);
        }
    }
    return rows;
}

// Irreducible Metzler matrix: ring plus random links, diagonal of either sign.
SquareMatrix random_metzler(Rng& rng, std::size_t n)
{
    std::uniform_real_distribution<double> diag(-10.0, 5.0);
    std::bernoulli_distribution link(0.4);
    SquareMatrix L(n);
    for (std::size_t i = 0; i < n; ++i) {
        L(i, i) = diag(rng);
        if (n > 1) {
            L((i + 1) % n, i) = log_uniform(rng, 0.01, 5.0);
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && L(i, j) == 0.0 && link(rng)) {
                L(i, j) = log_uniform(rng, 0.01, 5.0);
            }
        }
    }
    return L;
}

// Column-dominant Z-matrix shaped like diag(b) - M.
SquareMatrix random_population_matrix(Rng& rng, std::size_t n)
{
    SquareMatrix A(n);
    for (std::size_t c = 0; c < n; ++c) {
        double out = 0.0;
        for (std::size_t r = 0; r < n; ++r) {
            if (r != c) {
                A(r, c) = -log_uniform(rng, 0.01, 10.0);
                out -= A(r, c);
            }
        }
        A(c, c) = log_uniform(rng, 0.1, 100.0) + out;
    }
    return A;
}

} // namespace

TEST_CASE("solve_z small cases")
{
    const SquareMatrix A{{2, -1}, {-1, 2}};
    const std::vector<double> rhs{1, 1};
    const auto x = solve_z(A, rhs);
    CHECK(x[0] == doctest::Approx(1.0).epsilon(1e-15));
    CHECK(x[1] == doctest::Approx(1.0).epsilon(1e-15));

    const std::vector<double> B{3.5};
    CHECK(solve_z(SquareMatrix{{0.7}}, B)[0] == doctest::Approx(5.0).epsilon(1e-15));
}

TEST_CASE("solve_z residual and positivity on random admissible systems")
{
    Rng rng(21);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial) % 8;
        const auto A = random_population_matrix(rng, n);
        std::vector<double> rhs(n);
        double rhs_norm = 0.0;
        for (double& r : rhs) {
            r = log_uniform(rng, 0.1, 100.0);
            rhs_norm = std::max(rhs_norm, r);
        }
        const auto x = solve_z(A, rhs);
        const auto Ax = A.multiply(x);
        for (std::size_t i = 0; i < n; ++i) {
            CHECK(x[i] > 0.0);
            CHECK(std::abs(Ax[i] - rhs[i]) <= 1e-12 * rhs_norm);
        }
    }
}

TEST_CASE("solve_z precondition errors")
{
    const std::vector<double> rhs{1, 1};
    CHECK_THROWS_AS(solve_z(SquareMatrix{{2, 1}, {-1, 2}}, rhs), PreconditionError);
    CHECK_THROWS_AS(solve_z(SquareMatrix{{1, -1}, {-1, 1}}, rhs), PreconditionError);
    CHECK_THROWS_AS(solve_z(SquareMatrix{{2, -1}, {-1, 2}}, std::vector<double>{1, -1}), PreconditionError);
    CHECK_THROWS_AS(solve_z(SquareMatrix{{2, -1}, {-1, 2}}, std::vector<double>{1}), DimensionError);
    try {
        solve_z(SquareMatrix{{1, -2}, {-2, 1}}, rhs);
        FAIL("expected PreconditionError");
    } catch (const PreconditionError& e) {
        CHECK(std::string(e.what()).find("row 0") != std::string::npos);
    }
}

TEST_CASE("is_irreducible")
{
    CHECK(is_irreducible(SquareMatrix{{-0.3, 0.3}, {0.3, -0.3}}));
    CHECK_FALSE(is_irreducible(SquareMatrix{{-1, 0}, {0, -1}}));
    CHECK(is_irreducible(SquareMatrix{{5}}));

    SquareMatrix ring(4);
    for (std::size_t i = 0; i < 4; ++i) {
        ring((i + 1) % 4, i) = 1.0;
    }
    CHECK(is_irreducible(ring));
    CHECK(oracle::strongly_connected(rows_of(ring)));
    ring(0, 3) = 0.0;
    CHECK_FALSE(is_irreducible(ring));
}

TEST_CASE("is_irreducible agrees with a transitive-closure oracle")
{
    Rng rng(22);
    std::bernoulli_distribution link(0.25);
    int reducible = 0;
    for (int trial = 0; trial < 500; ++trial) {
        const std::size_t n = 1 + static_cast<std::size_t>(trial) % 7;
        SquareMatrix M(n);
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < n; ++j) {
                if (i != j && link(rng)) {
                    M(i, j) = 1.0;
                }
            }
        }
        const bool expected = oracle::strongly_connected(rows_of(M));
        reducible += expected ? 0 : 1;
        CHECK(is_irreducible(M) == expected);
    }
    CHECK(reducible > 50);
}

TEST_CASE("stability_modulus small cases")
{
    const auto one = stability_modulus(SquareMatrix{{-2.5}});
    CHECK(one.modulus == -2.5);
    CHECK(one.eigenvector == std::vector<double>{1.0});

    const double c = 0.7;
    const double m = 0.4;
    const auto two = stability_modulus(SquareMatrix{{c - m, m}, {m, c - m}});
    CHECK(two.modulus == doctest::Approx(c).epsilon(1e-12));
    CHECK(two.eigenvector[0] == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(two.residual <= 1e-12);
}

TEST_CASE("stability_modulus agrees with a dense eigensolver")
{
    Rng rng(23);
    for (int trial = 0; trial < 300; ++trial) {
        const std::size_t n = 2 + static_cast<std::size_t>(trial) % 7;
        const auto L = random_metzler(rng, n);
        const auto result = stability_modulus(L);
        CHECK(std::abs(result.modulus - oracle::max_real_eigenvalue(rows_of(L))) <= 1e-10);
        CHECK(result.residual <= 1e-12 * std::max(1.0, L.norm_inf()));
        for (double v : result.eigenvector) {
            CHECK(v > 0.0);
        }
        CHECK(result.modulus <= gershgorin_bound(L) + 1e-12);
    }
}

TEST_CASE("stability_modulus handles weak coupling with a large shift")
{
    // Nearly decoupled patches with equal diagonals: power iteration alone would stall.
    SquareMatrix L{{-1000.0, 1e-4, 0.0}, {0.0, -1000.0, 1e-4}, {1e-4, 0.0, -1000.0 + 1e-7}};
    const auto result = stability_modulus(L);
    CHECK(std::abs(result.modulus - oracle::max_real_eigenvalue(rows_of(L))) <= 1e-10);
}

TEST_CASE("stability_modulus shift equivariance")
{
    Rng rng(24);
    std::uniform_real_distribution<double> shift(-50.0, 50.0);
    for (int trial = 0; trial < 100; ++trial) {
        const auto L = random_metzler(rng, 2 + static_cast<std::size_t>(trial) % 6);
        const double alpha = shift(rng);
        const double s0 = stability_modulus(L).modulus;
        const double s1 = stability_modulus(L + SquareMatrix::identity(L.order()) * alpha).modulus;
        // Both moduli are accurate relative to the matrix norm, which the shift enlarges.
        const double scale = std::max(1.0, (L + SquareMatrix::identity(L.order()) * alpha).norm_inf());
        CHECK(std::abs(s1 - (s0 + alpha)) <= 1e-11 * scale);
    }
}

TEST_CASE("stability_modulus rejects non-Metzler and reducible input")
{
    CHECK_THROWS_AS(stability_modulus(SquareMatrix{{-1, -0.1}, {0.2, -1}}), PreconditionError);
    CHECK_THROWS_AS(stability_modulus(SquareMatrix{{-1, 0}, {0.2, -1}}), PreconditionError);
}

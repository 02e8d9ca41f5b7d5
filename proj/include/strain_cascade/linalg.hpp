#pragma once

#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

namespace strain_cascade
{

/// Dense row-major square matrix. Orders here are patch counts, so small.
class SquareMatrix
{
public:
    SquareMatrix() = default;
    explicit SquareMatrix(std::size_t order, double fill = 0.0);
    SquareMatrix(std::initializer_list<std::initializer_list<double>> rows);

    static SquareMatrix identity(std::size_t order);
    static SquareMatrix diagonal(std::span<const double> values);

    std::size_t order() const
    {
        return m_order;
    }

    double& operator()(std::size_t row, std::size_t col)
    {
        return m_entries[row * m_order + col];
    }
    double operator()(std::size_t row, std::size_t col) const
    {
        return m_entries[row * m_order + col];
    }

    std::span<const double> entries() const
    {
        return m_entries;
    }

    std::vector<double> multiply(std::span<const double> x) const;

    /// Max absolute row sum.
    double norm_inf() const;

    SquareMatrix operator+(const SquareMatrix& other) const;
    SquareMatrix operator-(const SquareMatrix& other) const;
    SquareMatrix operator*(double scale) const;

    bool operator==(const SquareMatrix&) const = default;

private:
    std::size_t m_order = 0;
    std::vector<double> m_entries;
};

/**
 * Solve A x = rhs for a nonsingular M-matrix A.
 *
 * A must be a Z-matrix (off-diagonals <= 0) with positive diagonal that is strictly
 * diagonally dominant by rows or by columns, and rhs must be componentwise positive.
 * The solution is then unique and strictly positive. Elimination uses partial pivoting
 * followed by one round of iterative refinement.
 */
std::vector<double> solve_z(const SquareMatrix& A, std::span<const double> rhs);

/// General dense solve by partial-pivot elimination; throws NumericError when singular.
std::vector<double> solve_dense(const SquareMatrix& A, std::span<const double> rhs);

/// True iff the digraph of nonzero off-diagonal entries is strongly connected.
bool is_irreducible(const SquareMatrix& M);

/// max_l (L_ll + sum_{i != l} L_li), an upper bound for the stability modulus of a Metzler matrix.
double gershgorin_bound(const SquareMatrix& L);

struct StabilityResult {
    double modulus = 0.0;
    std::vector<double> eigenvector; // positive, sums to 1
    std::size_t iterations = 0;
    double residual = 0.0; // ||L v - s v||_inf
};

/**
 * Stability modulus s(L) = max Re(lambda) of an irreducible Metzler matrix, together
 * with its Perron eigenvector.
 *
 * Power iteration on L + sigma I, sigma = 1 + max |L_ll|, which is nonnegative and
 * irreducible so its dominant eigenvalue is simple and real. When the spectral gap is
 * small relative to sigma the iteration switches to shift-and-invert steps with the
 * Collatz-Wielandt upper bound as the shift; (mu I - L)^{-1} is a positive matrix for
 * mu > s(L), so the iterate stays in the positive cone.
 *
 * Terminates once ||L v - s v||_inf <= tol * max(1, ||L||_inf).
 */
StabilityResult stability_modulus(const SquareMatrix& L, double tol = 1e-12,
                                  std::size_t max_iterations = 100000);

} // namespace strain_cascade

#include "strain_cascade/linalg.hpp"
#include "strain_cascade/errors.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <sstream>

namespace strain_cascade
{

SquareMatrix::SquareMatrix(std::size_t order, double fill)
    : m_order(order)
    , m_entries(order * order, fill)
{
}

SquareMatrix::SquareMatrix(std::initializer_list<std::initializer_list<double>> rows)
    : m_order(rows.size())
    , m_entries()
{
    m_entries.reserve(m_order * m_order);
    for (const auto& row : rows) {
        if (row.size() != m_order) {
            throw DimensionError("SquareMatrix: ragged initializer");
        }
        m_entries.insert(m_entries.end(), row.begin(), row.end());
    }
}

SquareMatrix SquareMatrix::identity(std::size_t order)
{
    SquareMatrix I(order);
    for (std::size_t i = 0; i < order; ++i) {
        I(i, i) = 1.0;
    }
    return I;
}

SquareMatrix SquareMatrix::diagonal(std::span<const double> values)
{
    SquareMatrix D(values.size());
    for (std::size_t i = 0; i < values.size(); ++i) {
        D(i, i) = values[i];
    }
    return D;
}

std::vector<double> SquareMatrix::multiply(std::span<const double> x) const
{
    if (x.size() != m_order) {
        throw DimensionError("SquareMatrix::multiply: vector length mismatch");
    }
    std::vector<double> y(m_order, 0.0);
    for (std::size_t r = 0; r < m_order; ++r) {
        double acc = 0.0;
        for (std::size_t c = 0; c < m_order; ++c) {
            acc += (*this)(r, c) * x[c];
        }
        y[r] = acc;
    }
    return y;
}

double SquareMatrix::norm_inf() const
{
    double best = 0.0;
    for (std::size_t r = 0; r < m_order; ++r) {
        double row = 0.0;
        for (std::size_t c = 0; c < m_order; ++c) {
            row += std::abs((*this)(r, c));
        }
        best = std::max(best, row);
    }
    return best;
}

SquareMatrix SquareMatrix::operator+(const SquareMatrix& other) const
{
    if (other.m_order != m_order) {
        throw DimensionError("SquareMatrix: order mismatch");
    }
    SquareMatrix out(*this);
    for (std::size_t i = 0; i < m_entries.size(); ++i) {
        out.m_entries[i] += other.m_entries[i];
    }
    return out;
}

SquareMatrix SquareMatrix::operator-(const SquareMatrix& other) const
{
    return *this + other * -1.0;
}

SquareMatrix SquareMatrix::operator*(double scale) const
{
    SquareMatrix out(*this);
    for (auto& e : out.m_entries) {
        e *= scale;
    }
    return out;
}

namespace
{

std::vector<double> residual_of(const SquareMatrix& A, std::span<const double> x, std::span<const double> rhs)
{
    auto r = A.multiply(x);
    for (std::size_t i = 0; i < r.size(); ++i) {
        r[i] = rhs[i] - r[i];
    }
    return r;
}

// LU with partial pivoting, stored in place.
class LuFactors
{
public:
    explicit LuFactors(const SquareMatrix& A)
        : m_lu(A)
        , m_pivot(A.order())
    {
        const std::size_t n = A.order();
        const double scale = std::max(A.norm_inf(), std::numeric_limits<double>::min());
        std::iota(m_pivot.begin(), m_pivot.end(), std::size_t{0});
        for (std::size_t k = 0; k < n; ++k) {
            std::size_t p = k;
            for (std::size_t r = k + 1; r < n; ++r) {
                if (std::abs(m_lu(r, k)) > std::abs(m_lu(p, k))) {
                    p = r;
                }
            }
            if (std::abs(m_lu(p, k)) <= 64 * std::numeric_limits<double>::epsilon() * scale) {
                std::ostringstream msg;
                msg << "matrix is singular to working precision (pivot column " << k << ")";
                throw NumericError(msg.str());
            }
            if (p != k) {
                for (std::size_t c = 0; c < n; ++c) {
                    std::swap(m_lu(k, c), m_lu(p, c));
                }
                std::swap(m_pivot[k], m_pivot[p]);
            }
            for (std::size_t r = k + 1; r < n; ++r) {
                const double f = m_lu(r, k) / m_lu(k, k);
                m_lu(r, k) = f;
                for (std::size_t c = k + 1; c < n; ++c) {
                    m_lu(r, c) -= f * m_lu(k, c);
                }
            }
        }
    }

    std::vector<double> solve(std::span<const double> b) const
    {
        const std::size_t n = m_lu.order();
        std::vector<double> x(n);
        for (std::size_t i = 0; i < n; ++i) {
            x[i] = b[m_pivot[i]];
        }
        for (std::size_t i = 0; i < n; ++i) {
            for (std::size_t j = 0; j < i; ++j) {
                x[i] -= m_lu(i, j) * x[j];
            }
        }
        for (std::size_t i = n; i-- > 0;) {
            for (std::size_t j = i + 1; j < n; ++j) {
                x[i] -= m_lu(i, j) * x[j];
            }
            x[i] /= m_lu(i, i);
        }
        return x;
    }

private:
    SquareMatrix m_lu;
    std::vector<std::size_t> m_pivot;
};

} // namespace

std::vector<double> solve_dense(const SquareMatrix& A, std::span<const double> rhs)
{
    if (rhs.size() != A.order() || A.order() == 0) {
        throw DimensionError("solve_dense: right-hand side length mismatch");
    }
    return LuFactors(A).solve(rhs);
}

std::vector<double> solve_z(const SquareMatrix& A, std::span<const double> rhs)
{
    const std::size_t n = A.order();
    if (n == 0) {
        throw PreconditionError("solve_z: empty matrix");
    }
    if (rhs.size() != n) {
        throw DimensionError("solve_z: right-hand side length mismatch");
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(rhs[i] > 0.0) || !std::isfinite(rhs[i])) {
            std::ostringstream msg;
            msg << "solve_z: right-hand side entry " << i << " is not positive";
            throw PreconditionError(msg.str());
        }
        if (!(A(i, i) > 0.0)) {
            std::ostringstream msg;
            msg << "solve_z: diagonal entry " << i << " is not positive";
            throw PreconditionError(msg.str());
        }
        for (std::size_t j = 0; j < n; ++j) {
            if (i != j && !(A(i, j) <= 0.0)) {
                std::ostringstream msg;
                msg << "solve_z: off-diagonal entry (" << i << "," << j << ") is positive; not a Z-matrix";
                throw PreconditionError(msg.str());
            }
        }
    }

    // Either row or column strict dominance makes A a nonsingular M-matrix.
    std::ptrdiff_t bad_row = -1;
    std::ptrdiff_t bad_col = -1;
    for (std::size_t i = 0; i < n; ++i) {
        double row_off = 0.0;
        double col_off = 0.0;
        for (std::size_t j = 0; j < n; ++j) {
            if (j != i) {
                row_off += std::abs(A(i, j));
                col_off += std::abs(A(j, i));
            }
        }
        if (bad_row < 0 && !(A(i, i) > row_off)) {
            bad_row = static_cast<std::ptrdiff_t>(i);
        }
        if (bad_col < 0 && !(A(i, i) > col_off)) {
            bad_col = static_cast<std::ptrdiff_t>(i);
        }
    }
    if (bad_row >= 0 && bad_col >= 0) {
        std::ostringstream msg;
        msg << "solve_z: not strictly diagonally dominant (row " << bad_row << " and column " << bad_col
            << " fail)";
        throw PreconditionError(msg.str());
    }

    const LuFactors lu(A);
    auto x = lu.solve(rhs);
    const auto r = residual_of(A, x, rhs);
    const auto dx = lu.solve(r);
    for (std::size_t i = 0; i < n; ++i) {
        x[i] += dx[i];
    }
    for (std::size_t i = 0; i < n; ++i) {
        if (!(x[i] > 0.0) || !std::isfinite(x[i])) {
            std::ostringstream msg;
            msg << "solve_z: solution component " << i << " is not positive (" << x[i] << ")";
            throw NumericError(msg.str());
        }
    }
    return x;
}

bool is_irreducible(const SquareMatrix& M)
{
    const std::size_t n = M.order();
    if (n <= 1) {
        return true;
    }
    auto reaches_all = [&](bool forward) {
        std::vector<char> seen(n, 0);
        std::vector<std::size_t> stack{0};
        seen[0] = 1;
        std::size_t count = 1;
        while (!stack.empty()) {
            const std::size_t u = stack.back();
            stack.pop_back();
            for (std::size_t v = 0; v < n; ++v) {
                const double w = forward ? M(u, v) : M(v, u);
                if (v != u && w != 0.0 && !seen[v]) {
                    seen[v] = 1;
                    ++count;
                    stack.push_back(v);
                }
            }
        }
        return count == n;
    };
    return reaches_all(true) && reaches_all(false);
}

double gershgorin_bound(const SquareMatrix& L)
{
    double bound = -std::numeric_limits<double>::infinity();
    for (std::size_t r = 0; r < L.order(); ++r) {
        double radius = 0.0;
        for (std::size_t c = 0; c < L.order(); ++c) {
            if (c != r) {
                radius += std::abs(L(r, c));
            }
        }
        bound = std::max(bound, L(r, r) + radius);
    }
    return bound;
}

namespace
{

struct PerronEstimate {
    double modulus;
    double upper; // Collatz-Wielandt upper bound max_i (Lv)_i / v_i
    double residual;
};

// v is positive and normalised to unit sum on entry.
PerronEstimate estimate(const SquareMatrix& L, std::span<const double> v, std::vector<double>& Lv)
{
    Lv = L.multiply(v);
    double s = 0.0;
    for (double x : Lv) {
        s += x;
    }
    double residual = 0.0;
    double upper = -std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i < v.size(); ++i) {
        residual = std::max(residual, std::abs(Lv[i] - s * v[i]));
        upper = std::max(upper, Lv[i] / v[i]);
    }
    return {s, upper, residual};
}

bool normalise(std::vector<double>& v)
{
    double sum = 0.0;
    for (double x : v) {
        if (!(x > 0.0) || !std::isfinite(x)) {
            return false;
        }
        sum += x;
    }
    for (double& x : v) {
        x /= sum;
    }
    return true;
}

} // namespace

StabilityResult stability_modulus(const SquareMatrix& L, double tol, std::size_t max_iterations)
{
    const std::size_t n = L.order();
    if (n == 0) {
        throw PreconditionError("stability_modulus: empty matrix");
    }
    double sigma = 0.0;
    for (std::size_t r = 0; r < n; ++r) {
        for (std::size_t c = 0; c < n; ++c) {
            if (!std::isfinite(L(r, c))) {
                throw PreconditionError("stability_modulus: non-finite entry");
            }
            if (r != c && L(r, c) < 0.0) {
                std::ostringstream msg;
                msg << "stability_modulus: entry (" << r << "," << c << ") is negative; not a Metzler matrix";
                throw PreconditionError(msg.str());
            }
        }
        sigma = std::max(sigma, std::abs(L(r, r)));
    }
    sigma += 1.0;
    if (!is_irreducible(L)) {
        throw PreconditionError("stability_modulus: matrix is reducible");
    }
    if (n == 1) {
        return {L(0, 0), {1.0}, 0, 0.0};
    }

    const double threshold = tol * std::max(1.0, L.norm_inf());
    const SquareMatrix shifted = L + SquareMatrix::identity(n) * sigma;

    std::vector<double> v(n, 1.0 / static_cast<double>(n));
    std::vector<double> Lv;
    PerronEstimate est = estimate(L, v, Lv);

    // Plain power iterations before switching to shift-and-invert.
    constexpr std::size_t power_phase = 500;
    std::size_t it = 0;
    for (; it < max_iterations && est.residual > threshold; ++it) {
        if (it >= power_phase) {
            // Shift strictly above s(L) so that mu I - L is a nonsingular M-matrix.
            const double gap = std::max(est.upper - est.modulus, 0.0);
            const double mu =
                est.upper + std::max(gap, 16 * std::numeric_limits<double>::epsilon() * (sigma + std::abs(est.upper)));
            SquareMatrix shifted_inverse = SquareMatrix::identity(n) * mu - L;
            std::vector<double> w;
            try {
                w = LuFactors(shifted_inverse).solve(v);
            } catch (const NumericError&) {
                break;
            }
            if (!normalise(w)) {
                break;
            }
            v = std::move(w);
        } else {
            v = shifted.multiply(v);
            if (!normalise(v)) {
                throw NumericError("stability_modulus: power iterate left the positive cone");
            }
        }
        est = estimate(L, v, Lv);
    }

    if (est.residual > threshold) {
        std::ostringstream msg;
        msg << "stability_modulus: no convergence after " << it << " iterations (estimate " << est.modulus
            << ", residual " << est.residual << ")";
        throw NumericError(msg.str());
    }

    // The stopping residual bounds the eigenvalue error only up to the conditioning of
    // the Perron root. A few inverse iterations just above the Collatz-Wielandt bound
    // converge in one or two steps from here and bring the estimate to round-off.
    for (int polish = 0; polish < 3; ++polish) {
        const double gap = std::max(est.upper - est.modulus, 0.0);
        const double mu =
            est.upper + std::max(gap, 16 * std::numeric_limits<double>::epsilon() * (sigma + std::abs(est.upper)));
        std::vector<double> w;
        try {
            w = LuFactors(SquareMatrix::identity(n) * mu - L).solve(v);
        } catch (const NumericError&) {
            break;
        }
        if (!normalise(w)) {
            break;
        }
        std::vector<double> Lw;
        const PerronEstimate next = estimate(L, w, Lw);
        if (next.residual > est.residual) {
            break;
        }
        v = std::move(w);
        est = next;
        ++it;
    }
    return {est.modulus, std::move(v), it, est.residual};
}

} // namespace strain_cascade

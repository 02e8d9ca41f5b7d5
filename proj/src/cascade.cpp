#include "strain_cascade/cascade.hpp"
#include "strain_cascade/errors.hpp"
#include "strain_cascade/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace strain_cascade
{

std::vector<std::size_t> CascadeReport::persistence_set() const
{
    std::vector<std::size_t> set;
    for (const auto& v : verdicts) {
        if (v.persists) {
            set.push_back(v.strain);
        }
    }
    std::sort(set.begin(), set.end());
    return set;
}

bool CascadeReport::disease_free() const
{
    return std::none_of(verdicts.begin(), verdicts.end(), [](const StrainVerdict& v) { return v.persists; });
}

const StrainVerdict& CascadeReport::verdict_for(std::size_t strain) const
{
    for (const auto& v : verdicts) {
        if (v.strain == strain) {
            return v;
        }
    }
    throw PreconditionError("verdict_for: no verdict for strain " + std::to_string(strain));
}

std::vector<double> total_population_limit(const ReductionCoefficients& coeffs, const SquareMatrix& connectivity)
{
    const std::size_t p = connectivity.order();
    if (coeffs.death.size() != p || coeffs.birth.size() != p) {
        throw DimensionError("total_population_limit: coefficient length mismatch");
    }
    const SquareMatrix A = SquareMatrix::diagonal(coeffs.death) - connectivity;
    return solve_z(A, coeffs.birth);
}

std::vector<double> growth_rates(std::size_t strain, const ReductionCoefficients& coeffs,
                                 std::span<const double> total_population, const ModelParameters& params)
{
    if (strain >= params.strains) {
        throw PreconditionError("growth_rates: strain index out of range");
    }
    if (total_population.size() != params.patches || coeffs.death.size() != params.patches) {
        throw DimensionError("growth_rates: per-patch length mismatch");
    }
    std::vector<double> c(params.patches);
    for (std::size_t l = 0; l < params.patches; ++l) {
        c[l] = params.beta_diag[l][strain] * total_population[l] - (coeffs.death[l] + params.theta[l][strain]);
    }
    return c;
}

SquareMatrix threshold_matrix(std::size_t strain, const ReductionCoefficients& coeffs,
                              std::span<const double> total_population, const ModelParameters& params)
{
    const auto c = growth_rates(strain, coeffs, total_population, params);
    return connectivity_matrix(params) + SquareMatrix::diagonal(c);
}

namespace
{

double norm_inf(std::span<const double> v)
{
    double m = 0.0;
    for (double x : v) {
        m = std::max(m, std::abs(x));
    }
    return m;
}

class LvSystem
{
public:
    LvSystem(std::span<const double> c, std::span<const double> beta, const SquareMatrix& M)
        : m_c(c)
        , m_beta(beta)
        , m_M(M)
    {
    }

    std::vector<double> residual(std::span<const double> T) const
    {
        auto F = m_M.multiply(T);
        for (std::size_t l = 0; l < F.size(); ++l) {
            F[l] += T[l] * (m_c[l] - m_beta[l] * T[l]);
        }
        return F;
    }

    SquareMatrix jacobian(std::span<const double> T) const
    {
        SquareMatrix J = m_M;
        for (std::size_t l = 0; l < T.size(); ++l) {
            J(l, l) += m_c[l] - 2.0 * m_beta[l] * T[l];
        }
        return J;
    }

    double tolerance(std::span<const double> T, double tol) const
    {
        return tol * std::max(1.0, (norm_inf(m_c) + m_M.norm_inf()) * norm_inf(T));
    }

private:
    std::span<const double> m_c;
    std::span<const double> m_beta;
    const SquareMatrix& m_M;
};

struct NewtonOutcome {
    std::vector<double> T;
    double residual;
    bool converged;
};

NewtonOutcome damped_newton(const LvSystem& sys, std::vector<double> T, double tol)
{
    constexpr int max_iterations = 100;
    constexpr int max_halvings = 60;
    auto F = sys.residual(T);
    double r = norm_inf(F);
    for (int it = 0; it < max_iterations; ++it) {
        if (r <= sys.tolerance(T, tol)) {
            return {std::move(T), r, true};
        }
        std::vector<double> step;
        try {
            step = solve_dense(sys.jacobian(T), F);
        } catch (const NumericError&) {
            return {std::move(T), r, false};
        }
        double lambda = 1.0;
        bool accepted = false;
        for (int h = 0; h <= max_halvings; ++h, lambda *= 0.5) {
            std::vector<double> trial(T.size());
            bool positive = true;
            for (std::size_t l = 0; l < T.size(); ++l) {
                trial[l] = T[l] - lambda * step[l];
                positive = positive && trial[l] > 0.0 && std::isfinite(trial[l]);
            }
            if (!positive) {
                continue;
            }
            auto Ft = sys.residual(trial);
            const double rt = norm_inf(Ft);
            if (rt < r || rt <= sys.tolerance(trial, tol)) {
                T = std::move(trial);
                F = std::move(Ft);
                r = rt;
                accepted = true;
                break;
            }
        }
        if (!accepted) {
            return {std::move(T), r, r <= sys.tolerance(T, tol)};
        }
    }
    return {std::move(T), r, r <= sys.tolerance(T, tol)};
}

} // namespace

std::vector<double> lv_equilibrium(std::span<const double> c, std::span<const double> beta,
                                   const SquareMatrix& connectivity, double tol)
{
    const std::size_t p = connectivity.order();
    if (c.size() != p || beta.size() != p) {
        throw DimensionError("lv_equilibrium: vector lengths must match the connectivity matrix order");
    }
    const SquareMatrix L = connectivity + SquareMatrix::diagonal(c);
    const double s = stability_modulus(L).modulus;
    if (s <= 0.0) {
        return std::vector<double>(p, 0.0);
    }

    const LvSystem sys(c, beta, connectivity);
    std::vector<double> guess(p);
    for (std::size_t l = 0; l < p; ++l) {
        guess[l] = std::max(c[l], s) / beta[l];
    }
    auto newton = damped_newton(sys, guess, tol);
    if (newton.converged) {
        return std::move(newton.T);
    }

    IntegratorConfig config;
    config.max_time = 1e7;
    config.convergence_window = 50.0;
    config.convergence_eps = 1e-11;
    config.sample_interval = 1.0;
    config.abs_tol = 1e-14 * std::max(1.0, norm_inf(guess));
    const auto flow = lv_integrate(c, beta, connectivity, guess, config);
    auto polished = damped_newton(sys, flow.state, tol);
    if (polished.converged) {
        return std::move(polished.T);
    }
    auto& best = polished.residual <= newton.residual ? polished : newton;
    std::ostringstream msg;
    msg << "lv_equilibrium: residual " << best.residual << " above tolerance after Newton and integration fallback";
    throw LvConvergenceError(msg.str(), best.T, best.residual);
}

EquilibriumPoint assemble_equilibrium(std::span<const StrainVerdict> verdicts, std::size_t patches,
                                      std::size_t strains)
{
    if (verdicts.size() != strains || strains == 0) {
        throw PreconditionError("assemble_equilibrium: expected one verdict per strain");
    }
    EquilibriumPoint E;
    E.susceptible.assign(patches, 0.0);
    E.infected.assign(patches, std::vector<double>(strains, 0.0));
    const StrainVerdict* mildest = nullptr;
    for (const auto& v : verdicts) {
        if (v.strain >= strains || v.levels.size() != patches) {
            throw DimensionError("assemble_equilibrium: verdict shape mismatch");
        }
        for (std::size_t l = 0; l < patches; ++l) {
            E.infected[l][v.strain] = v.levels[l];
        }
        if (v.strain == 0) {
            mildest = &v;
        }
    }
    if (mildest == nullptr || mildest->total_population_limit.size() != patches) {
        throw PreconditionError("assemble_equilibrium: missing verdict for strain 1");
    }
    for (std::size_t l = 0; l < patches; ++l) {
        const double N = mildest->total_population_limit[l];
        double S = N - mildest->levels[l];
        if (S < 0.0) {
            if (S < -1e-9 * std::max(1.0, N)) {
                std::ostringstream msg;
                msg << "assemble_equilibrium: negative susceptible level " << S << " on patch " << l;
                throw NumericError(msg.str());
            }
            S = 0.0;
        }
        E.susceptible[l] = S;
    }
    return E;
}

CascadeReport run_cascade(const ModelParameters& params, const CascadeOptions& options)
{
    if (const auto violations = validate(params); !violations.empty()) {
        std::string what = "run_cascade: invalid parameters:";
        for (const auto& v : violations) {
            what += " " + v.to_string() + ";";
        }
        throw PreconditionError(what);
    }
    const std::size_t p = params.patches;
    const std::size_t n = params.strains;
    const SquareMatrix M = connectivity_matrix(params);

    CascadeReport report;
    ReductionCoefficients coeffs{0, params.death, params.birth};
    for (std::size_t q = 0; q < n; ++q) {
        const std::size_t k = n - 1 - q;
        coeffs.step = q;
        report.coefficients.push_back(coeffs);
        try {
            StrainVerdict v;
            v.strain = k;
            v.total_population_limit = total_population_limit(coeffs, M);
            v.growth_rates = growth_rates(k, coeffs, v.total_population_limit, params);
            const SquareMatrix Mk = M + SquareMatrix::diagonal(v.growth_rates);
            if (!is_irreducible(Mk)) {
                throw PreconditionError("threshold matrix is reducible");
            }
            const auto stab = stability_modulus(Mk, options.modulus_tol);
            v.threshold = stab.modulus;
            v.eigenvector = stab.eigenvector;
            v.persists = v.threshold > 0.0;
            v.near_threshold = std::abs(v.threshold) < 1e-10;

            std::vector<double> beta(p);
            for (std::size_t l = 0; l < p; ++l) {
                beta[l] = params.beta_diag[l][k];
            }
            if (v.persists) {
                v.levels = lv_equilibrium(v.growth_rates, beta, M, options.lv_tol);
                v.weak_persistence = std::any_of(v.levels.begin(), v.levels.end(), [](double t) { return t < 1e-12; });
            } else {
                v.levels.assign(p, 0.0);
            }
            for (std::size_t l = 0; l < p; ++l) {
                coeffs.death[l] += beta[l] * v.levels[l];
                coeffs.birth[l] += params.theta[l][k] * v.levels[l];
            }
            report.verdicts.push_back(std::move(v));
        } catch (const LvConvergenceError& e) {
            throw LvConvergenceError("cascade step " + std::to_string(q) + " (strain " + std::to_string(k + 1) +
                                         "): " + e.what(),
                                     e.best_iterate(), e.residual());
        } catch (const NumericError& e) {
            throw NumericError("cascade step " + std::to_string(q) + " (strain " + std::to_string(k + 1) +
                               "): " + e.what());
        }
    }
    report.equilibrium = assemble_equilibrium(report.verdicts, p, n);
    return report;
}

} // namespace strain_cascade

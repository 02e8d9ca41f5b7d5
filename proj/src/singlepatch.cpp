#include "strain_cascade/singlepatch.hpp"
#include "strain_cascade/errors.hpp"

namespace strain_cascade
{

SinglePatchResult r0_cascade(const ModelParameters& params)
{
    if (params.patches != 1) {
        throw PreconditionError("r0_cascade: requires exactly one patch");
    }
    if (!validate(params).empty()) {
        throw PreconditionError("r0_cascade: invalid parameters");
    }
    const std::size_t n = params.strains;
    const auto& beta = params.beta_diag[0];
    const auto& theta = params.theta[0];

    SinglePatchResult result;
    result.equilibrium.susceptible.assign(1, 0.0);
    result.equilibrium.infected.assign(1, std::vector<double>(n, 0.0));

    double B = params.birth[0];
    double b = params.death[0];
    for (std::size_t step = 0; step < n; ++step) {
        const std::size_t k = n - 1 - step;
        const double r0 = B * beta[k] / (b * (b + theta[k]));
        double level = 0.0;
        if (r0 > 1.0) {
            level = (B * beta[k] - (b + theta[k]) * b) / (beta[k] * b);
        }
        result.sequence.entries.push_back({k, r0, level, B, b});
        result.equilibrium.infected[0][k] = level;
        if (k == 0) {
            // Terminal (S, T_1) system.
            result.equilibrium.susceptible[0] = r0 > 1.0 ? (b + theta[0]) / beta[0] : B / b;
        } else {
            B += theta[k] * level;
            b += beta[k] * level;
        }
    }
    return result;
}

} // namespace strain_cascade

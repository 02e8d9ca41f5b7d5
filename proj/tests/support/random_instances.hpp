#pragma once

#include "strain_cascade/model.hpp"

#include <cmath>
#include <random>
#include <vector>

namespace testing_support
{

using Rng = std::mt19937_64;

inline double log_uniform(Rng& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return std::exp(u(rng));
}

struct RateRanges {
    double birth_lo = 0.1, birth_hi = 100.0;
    double death_lo = 0.1, death_hi = 100.0;
    double beta_lo = 0.01, beta_hi = 10.0;
    double theta_lo = 0.01, theta_hi = 10.0;
    double migration_lo = 0.01, migration_hi = 10.0;
};

/// Random admissible instance: every rate log-uniform over three decades and an
/// irreducible migration network (a directed ring plus random extra links).
inline strain_cascade::ModelParameters random_params(Rng& rng, std::size_t p, std::size_t n,
                                                     const RateRanges& r = {})
{
    strain_cascade::ModelParameters m;
    m.patches = p;
    m.strains = n;
    m.migration.assign(p, std::vector<double>(p, 0.0));
    std::bernoulli_distribution extra_link(0.5);
    for (std::size_t l = 0; l < p; ++l) {
        m.birth.push_back(log_uniform(rng, r.birth_lo, r.birth_hi));
        m.death.push_back(log_uniform(rng, r.death_lo, r.death_hi));
        m.beta_diag.emplace_back();
        m.theta.emplace_back();
        for (std::size_t k = 0; k < n; ++k) {
            m.beta_diag[l].push_back(log_uniform(rng, r.beta_lo, r.beta_hi));
            m.theta[l].push_back(log_uniform(rng, r.theta_lo, r.theta_hi));
        }
    }
    if (p > 1) {
        for (std::size_t l = 0; l < p; ++l) {
            m.migration[(l + 1) % p][l] = log_uniform(rng, r.migration_lo, r.migration_hi);
        }
        for (std::size_t l = 0; l < p; ++l) {
            for (std::size_t i = 0; i < p; ++i) {
                if (l != i && m.migration[l][i] == 0.0 && extra_link(rng)) {
                    m.migration[l][i] = log_uniform(rng, r.migration_lo, r.migration_hi);
                }
            }
        }
    }
    return m;
}

inline strain_cascade::ModelParameters single_patch(double B, double b, std::vector<double> beta,
                                                    std::vector<double> theta)
{
    strain_cascade::ModelParameters m;
    m.patches = 1;
    m.strains = beta.size();
    m.birth = {B};
    m.death = {b};
    m.beta_diag = {std::move(beta)};
    m.theta = {std::move(theta)};
    m.migration = {{0.0}};
    return m;
}

/// Two identical patches exchanging at rate m in both directions.
inline strain_cascade::ModelParameters symmetric_two_patch(double B, double b, std::vector<double> beta,
                                                           std::vector<double> theta, double m)
{
    strain_cascade::ModelParameters p;
    p.patches = 2;
    p.strains = beta.size();
    p.birth = {B, B};
    p.death = {b, b};
    p.beta_diag = {beta, beta};
    p.theta = {theta, theta};
    p.migration = {{0.0, m}, {m, 0.0}};
    return p;
}

} // namespace testing_support

#pragma once

#include "strain_cascade/linalg.hpp"

#include <cstddef>
#include <span>
#include <string>
#include <vector>

namespace strain_cascade
{

/**
 * Rates of the multistrain SIS model with superinfection on a network of patches.
 *
 * Strains are indexed 0..n-1 in order of increasing virulence: strain j superinfects
 * hosts carrying strain i whenever i < j. Only the diagonal transmission rates are
 * stored; the full transmission matrix of a patch is derived by full_beta().
 *
 * migration[l][i] is the travel rate from patch i to patch l. The same rate applies to
 * every compartment of patch i, and the diagonal must be zero.
 */
struct ModelParameters {
    std::size_t patches = 0;
    std::size_t strains = 0;
    std::vector<double> birth;                  // B^l, individuals / time
    std::vector<double> death;                  // b^l, 1 / time
    std::vector<std::vector<double>> beta_diag; // [patch][strain], 1 / (individuals time)
    std::vector<std::vector<double>> theta;     // [patch][strain] recovery, 1 / time
    std::vector<std::vector<double>> migration; // [to][from], 1 / time

    /// Total rate at which individuals leave patch l: sum_i m[i][l].
    double outflow(std::size_t patch) const;

    bool operator==(const ModelParameters&) const = default;
};

/// Phase point (S^1, T^1_1..T^1_n, ..., S^p, T^p_1..T^p_n).
class StateVector
{
public:
    StateVector() = default;
    StateVector(std::size_t patches, std::size_t strains);
    StateVector(std::size_t patches, std::size_t strains, std::vector<double> values);

    std::size_t patches() const
    {
        return m_patches;
    }
    std::size_t strains() const
    {
        return m_strains;
    }
    std::size_t size() const
    {
        return m_values.size();
    }

    double& susceptible(std::size_t patch)
    {
        return m_values[patch * (m_strains + 1)];
    }
    double susceptible(std::size_t patch) const
    {
        return m_values[patch * (m_strains + 1)];
    }
    double& infected(std::size_t patch, std::size_t strain)
    {
        return m_values[patch * (m_strains + 1) + 1 + strain];
    }
    double infected(std::size_t patch, std::size_t strain) const
    {
        return m_values[patch * (m_strains + 1) + 1 + strain];
    }

    /// S^l + sum_k T^l_k
    double total(std::size_t patch) const;

    std::span<double> values()
    {
        return m_values;
    }
    std::span<const double> values() const
    {
        return m_values;
    }

    bool operator==(const StateVector&) const = default;

private:
    std::size_t m_patches = 0;
    std::size_t m_strains = 0;
    std::vector<double> m_values;
};

struct Violation {
    std::string field;
    std::vector<std::size_t> index;
    std::string reason;

    std::string to_string() const;
};

/// Transmission matrix of one patch: beta_kj = beta_kk for j <= k, beta_kj = -beta_jj for j > k.
SquareMatrix full_beta(const ModelParameters& params, std::size_t patch);

/// Connectivity matrix: off-diagonal m[l][i], diagonal minus total outflow. Columns sum to zero.
SquareMatrix connectivity_matrix(const ModelParameters& params);

/**
 * Collect every shape, sign and connectivity violation. Empty result means valid.
 * Never throws on finite or non-finite numeric input.
 */
std::vector<Violation> validate(const ModelParameters& params);

/// Right-hand side of the full system; throws DimensionError on mismatched state size.
std::vector<double> rhs(const ModelParameters& params, const StateVector& state);

/// Allocation-free variant used by the integrator. Buffers must have length (n+1)p.
void rhs_into(const ModelParameters& params, std::span<const double> state, std::span<double> out);

} // namespace strain_cascade

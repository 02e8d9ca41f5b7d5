#pragma once

#include "strain_cascade/equilibrium.hpp"
#include "strain_cascade/linalg.hpp"
#include "strain_cascade/model.hpp"

#include <cstddef>
#include <span>
#include <vector>

namespace strain_cascade
{

/// Effective per-patch death and birth rates after q strains have been eliminated.
struct ReductionCoefficients {
    std::size_t step = 0;
    std::vector<double> death; // b_(q)
    std::vector<double> birth; // B_(q)
};

struct StrainVerdict {
    std::size_t strain = 0;                   // zero-based strain index
    double threshold = 0.0;                   // s(M_k)
    bool persists = false;                    // threshold > 0
    bool near_threshold = false;              // |threshold| < 1e-10
    bool weak_persistence = false;            // persists with some level < 1e-12
    std::vector<double> levels;               // T*_k per patch
    std::vector<double> total_population_limit; // N*_k per patch
    std::vector<double> growth_rates;         // c^l_k, diagonal shift of M_k
    std::vector<double> eigenvector;          // Perron vector of M_k
};

struct CascadeReport {
    std::vector<StrainVerdict> verdicts;              // strain n first, strain 1 last
    std::vector<ReductionCoefficients> coefficients;  // coefficients used at step q = 0..n-1
    EquilibriumPoint equilibrium;

    /// Zero-based indices of persisting strains, ascending.
    std::vector<std::size_t> persistence_set() const;
    bool disease_free() const;
    const StrainVerdict& verdict_for(std::size_t strain) const;
};

struct CascadeOptions {
    double modulus_tol = 1e-12;
    double lv_tol = 1e-12;
};

/// Unique positive N* with (diag(b_q) - M) N* = B_q, where M is the connectivity matrix.
std::vector<double> total_population_limit(const ReductionCoefficients& coeffs, const SquareMatrix& connectivity);

/**
 * M_k = M + diag(c), c^l = beta^l_kk N*^l - (b^l_(q) + theta^l_k).
 */
SquareMatrix threshold_matrix(std::size_t strain, const ReductionCoefficients& coeffs,
                              std::span<const double> total_population, const ModelParameters& params);

/// Per-patch growth rates c^l_k on the diagonal of threshold_matrix.
std::vector<double> growth_rates(std::size_t strain, const ReductionCoefficients& coeffs,
                                 std::span<const double> total_population, const ModelParameters& params);

/**
 * Globally stable equilibrium of T_l' = T_l (c_l - beta_l T_l) + sum_i M_li T_i.
 *
 * Zero when s(M + diag(c)) <= 0. Otherwise the unique positive root, found by damped
 * Newton from T_l = max(c_l, s) / beta_l; if Newton stalls or leaves the positive orthant
 * the system is integrated forward and the terminal state polished by Newton.
 * Converged when the residual is <= tol * max(1, |c|_inf |T|_inf). Throws LvConvergenceError.
 */
std::vector<double> lv_equilibrium(std::span<const double> c, std::span<const double> beta,
                                   const SquareMatrix& connectivity, double tol = 1e-12);

/// Runs the elimination from the most virulent strain down; params must validate.
CascadeReport run_cascade(const ModelParameters& params, const CascadeOptions& options = {});

/**
 * E with T_k from verdict k and S = N*_1 - T*_1 (from the last verdict).
 * Throws NumericError when S would be negative beyond -1e-9 max(1, N*_1).
 */
EquilibriumPoint assemble_equilibrium(std::span<const StrainVerdict> verdicts, std::size_t patches,
                                      std::size_t strains);

} // namespace strain_cascade

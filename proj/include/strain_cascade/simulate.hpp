#pragma once

#include "strain_cascade/model.hpp"

#include <cstddef>
#include <functional>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

namespace strain_cascade
{

struct EquilibriumPoint;

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-12;
    double max_time = 5000.0;
    std::size_t max_steps = 20'000'000;
    double convergence_eps = 1e-9;
    double convergence_window = 50.0;
    double sample_interval = 0.5;
    bool stop_on_convergence = true;

    bool operator==(const IntegratorConfig&) const = default;
};

/// Empty result means the configuration is usable.
std::vector<std::string> check_config(const IntegratorConfig& config);

enum class TrajectoryStatus { converged, max_time, failed };

const char* to_string(TrajectoryStatus status);

struct Trajectory {
    std::size_t patches = 0;
    std::size_t strains = 0;
    std::vector<double> times;
    std::vector<StateVector> states;
    TrajectoryStatus status = TrajectoryStatus::failed;
    std::string failure;                 // set when status == failed
    double convergence_window = 0.0;     // copied from the config
    double converged_at = -1.0;          // time the window criterion first held, or -1
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t rhs_evaluations = 0;
    std::size_t clamped_components = 0;  // negative round-off set to zero

    const StateVector& final_state() const
    {
        return states.back();
    }
};

/// Right-hand side callback: (t, y, dydt).
using OdeRhs = std::function<void(double, std::span<const double>, std::span<double>)>;

struct OdeSolution {
    std::vector<double> times;
    std::vector<std::vector<double>> states;
    TrajectoryStatus status = TrajectoryStatus::failed;
    std::string failure;
    double converged_at = -1.0;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t rhs_evaluations = 0;
    std::size_t clamped_components = 0;
};

/**
 * Dormand-Prince 5(4) with the standard fourth-order continuous extension.
 *
 * States are sampled on the grid k * sample_interval (plus the terminal time). Solutions
 * are kept in the nonnegative orthant: after each accepted step components in
 * [-1e-12 max(1, |y|_inf), 0) are clamped to zero and counted, anything more negative
 * fails the run. With stop_on_convergence the run ends once the samples of the trailing
 * convergence_window have diameter <= convergence_eps max(1, |y|_inf).
 */
OdeSolution integrate_nonnegative(const OdeRhs& f, std::vector<double> y0, const IntegratorConfig& config);

/// Forward integration of the full model from `initial`.
Trajectory integrate(const ModelParameters& params, const StateVector& initial, const IntegratorConfig& config);

/// max over components of |x - target| / max(1, |target|_inf).
double relative_distance(const StateVector& x, const EquilibriumPoint& target);

/**
 * True iff every sample in the trailing convergence window (and the final state) lies within
 * eps of target in the relative infinity norm. Requires status converged or max_time.
 */
bool converged_to(const Trajectory& trajectory, const EquilibriumPoint& target, double eps);

struct LvIntegration {
    std::vector<double> state;
    TrajectoryStatus status = TrajectoryStatus::failed;
    double time = 0.0;
};

/**
 * Integrate the patch Lotka-Volterra system
 *   T_l' = T_l (c_l - beta_l T_l) + sum_i M_li T_i
 * with M the connectivity matrix, until the window criterion holds.
 */
LvIntegration lv_integrate(std::span<const double> c, std::span<const double> beta, const SquareMatrix& connectivity,
                           std::span<const double> initial, const IntegratorConfig& config);

/// CSV with header t,S_1,T_1_1,...,T_1_n,...,S_p,...,T_p_n and 17 significant digits.
void write_trajectory_csv(std::ostream& out, const Trajectory& trajectory);

} // namespace strain_cascade

#pragma once

#include "strain_cascade/cascade.hpp"
#include "strain_cascade/config.hpp"
#include "strain_cascade/singlepatch.hpp"

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

namespace strain_cascade
{

/// Process exit codes of the command line tool.
enum ExitCode : int {
    exit_success = 0,
    exit_verification_failure = 1,
    exit_validation_error = 2,
    exit_numeric_failure = 3,
};

/// Worker count: STRAIN_CASCADE_THREADS if set to a positive integer, else hardware concurrency.
std::size_t worker_count();

/// Runs job(i) for i in [0, count) on up to `workers` threads.
void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job);

/// Strictly positive initial state with components log-uniform in [1e-3, 10] N*^l.
StateVector random_initial_state(const ModelParameters& params, const std::vector<double>& total_population,
                                 std::uint64_t seed);

/// ||rhs(params, E)||_inf
double equilibrium_residual(const ModelParameters& params, const EquilibriumPoint& E);

/// Machine-readable cascade report. `single_patch` is included when present.
std::string report_json(const ModelParameters& params, const CascadeReport& report,
                        const SinglePatchResult* single_patch);
std::string report_text(const ModelParameters& params, const CascadeReport& report,
                        const SinglePatchResult* single_patch);

/// "{1,3}" with one-based strain labels.
std::string format_persistence_set(const std::vector<std::size_t>& set);

/// A scalar parameter addressed by path and a linear grid, e.g. "beta_diag[0][1]=0.5:4:8".
/// Indices are zero-based; "*" addresses every entry along that axis.
struct SweepAxis {
    std::string parameter;
    double start = 0.0;
    double stop = 0.0;
    std::size_t steps = 0;

    std::vector<double> grid() const;
};

/// Throws ConfigError on malformed specs.
SweepAxis parse_axis(const std::string& spec);

/// Sets every entry addressed by `path`; throws ConfigError on bad paths.
void apply_parameter(ModelParameters& params, const std::string& path, double value);

struct SimulateOptions {
    std::optional<std::string> initial_file;
    std::optional<std::uint64_t> seed;
};

struct VerifyOptions {
    /// Replaces the cascade equilibrium as the convergence target (harness self-test).
    std::optional<EquilibriumPoint> target_override;
};

/// Each command writes files under `out_dir` and a human-readable summary to `out`/`err`.
int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err);
int cmd_thresholds(const RunConfig& config, const std::string& out_dir, std::ostream& out, std::ostream& err);
int cmd_simulate(const RunConfig& config, const SimulateOptions& options, const std::string& out_dir,
                 std::ostream& out, std::ostream& err);
int cmd_verify(const RunConfig& config, const VerifyOptions& options, const std::string& out_dir, std::ostream& out,
               std::ostream& err);
int cmd_sweep(const RunConfig& config, const SweepAxis& axis, const std::string& out_dir, std::ostream& out,
              std::ostream& err);

/// Full command line entry point: strain-cascade <command> --config <path> [...].
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace strain_cascade

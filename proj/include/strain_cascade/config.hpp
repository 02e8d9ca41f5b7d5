#pragma once

#include "strain_cascade/errors.hpp"
#include "strain_cascade/model.hpp"
#include "strain_cascade/simulate.hpp"

#include <cstdint>
#include <string>
#include <vector>

namespace strain_cascade
{

/**
 * Everything a command needs. JSON schema:
 *
 *   {
 *     "patches": 2, "strains": 3,
 *     "birth": [..p..], "death": [..p..],
 *     "beta_diag": [[..n..] x p], "theta": [[..n..] x p],
 *     "migration": [[..p..] x p],          // migration[l][i]: rate from patch i to patch l
 *     "integrator": { "rel_tol", "abs_tol", "max_time", "max_steps", "convergence_eps",
 *                     "convergence_window", "sample_interval", "stop_on_convergence" },  // optional
 *     "seeds": [1, 2, 3],                   // optional, default [1]
 *     "verify_eps": 1e-5,                   // optional
 *     "outputs": { "directory": "out" }     // optional, default "."
 *   }
 *
 * Unknown keys at any level are errors.
 */
struct RunConfig {
    ModelParameters model;
    IntegratorConfig integrator;
    std::vector<std::uint64_t> seeds{1};
    double verify_eps = 1e-5;
    std::string output_directory = ".";

    bool operator==(const RunConfig&) const = default;
};

/// Syntax or schema problems; `problems` holds one line per issue.
class ConfigError : public Error
{
public:
    explicit ConfigError(std::vector<std::string> problems);

    const std::vector<std::string>& problems() const
    {
        return m_problems;
    }

private:
    std::vector<std::string> m_problems;
};

/// Parses and shape-checks; model validation is left to validate().
RunConfig parse_config_text(const std::string& text, const std::string& source = "<config>");
RunConfig parse_config(const std::string& path);

/// Canonical JSON form; parse_config_text(serialize_config(c)) == c.
std::string serialize_config(const RunConfig& config);

} // namespace strain_cascade

// Random search for two-patch, three-strain instances realising each persistence
// pattern. For every pattern the first candidate whose smallest threshold margin
// reaches 1 (or else the widest one seen) is checked by forward simulation and
// written as a run configuration.

#include "strain_cascade/cascade.hpp"
#include "strain_cascade/commands.hpp"
#include "strain_cascade/config.hpp"
#include "strain_cascade/simulate.hpp"

#include "CLI11.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <random>

using namespace strain_cascade;

namespace
{

constexpr std::size_t patches = 2;
constexpr std::size_t strains = 3;

double round_sig(double x, int digits)
{
    const double mag = std::pow(10.0, digits - 1 - static_cast<int>(std::floor(std::log10(x))));
    return std::round(x * mag) / mag;
}

double draw(std::mt19937_64& rng, double lo, double hi)
{
    std::uniform_real_distribution<double> u(std::log(lo), std::log(hi));
    return round_sig(std::exp(u(rng)), 3);
}

ModelParameters candidate(std::mt19937_64& rng)
{
    ModelParameters m;
    m.patches = patches;
    m.strains = strains;
    m.migration.assign(patches, std::vector<double>(patches, 0.0));
    for (std::size_t l = 0; l < patches; ++l) {
        m.birth.push_back(draw(rng, 0.5, 5.0));
        m.death.push_back(draw(rng, 0.2, 2.0));
        m.beta_diag.emplace_back();
        m.theta.emplace_back();
        for (std::size_t k = 0; k < strains; ++k) {
            m.beta_diag[l].push_back(draw(rng, 0.05, 20.0));
            m.theta[l].push_back(draw(rng, 0.1, 5.0));
        }
    }
    m.migration[0][1] = draw(rng, 0.05, 2.0);
    m.migration[1][0] = draw(rng, 0.05, 2.0);
    return m;
}

/// Smallest |s(M_k)| over the cascade, or a negative value when some persisting
/// level is too small to be told apart from extinction.
double margin(const CascadeReport& report)
{
    double m = INFINITY;
    for (const auto& v : report.verdicts) {
        m = std::min(m, std::abs(v.threshold));
        if (v.persists) {
            for (double level : v.levels) {
                if (level < 1e-3) {
                    return -1.0;
                }
            }
        }
    }
    return m;
}

std::string pattern_name(const std::vector<std::size_t>& set)
{
    if (set.empty()) {
        return "none";
    }
    std::string name;
    for (std::size_t k : set) {
        name += (name.empty() ? "" : "_") + std::to_string(k + 1);
    }
    return name;
}

bool simulation_agrees(const ModelParameters& params, const CascadeReport& report)
{
    IntegratorConfig cfg;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto x0 = random_initial_state(params, report.verdicts.front().total_population_limit, seed);
        const auto traj = integrate(params, x0, cfg);
        if (traj.status == TrajectoryStatus::failed || !converged_to(traj, report.equilibrium, 1e-5)) {
            return false;
        }
    }
    return true;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Search for coexistence fixtures"};
    std::string out_dir = "tests/fixtures";
    std::uint64_t seed = 1;
    std::size_t trials = 200000;
    double min_margin = 0.1;
    app.add_option("--out", out_dir, "fixture directory");
    app.add_option("--seed", seed, "random seed");
    app.add_option("--trials", trials, "number of random candidates");
    app.add_option("--min-margin", min_margin, "required smallest |s(M_k)|");
    CLI11_PARSE(app, argc, argv);

    std::mt19937_64 rng(seed);
    struct Best {
        ModelParameters params;
        double margin = -1.0;
    };
    std::map<std::vector<std::size_t>, Best> best;

    for (std::size_t t = 0; t < trials; ++t) {
        auto params = candidate(rng);
        CascadeReport report;
        try {
            report = run_cascade(params);
        } catch (const Error&) {
            continue;
        }
        // Margins beyond 1 buy nothing and tend to come with stiff rates.
        const double m = std::min(margin(report), 1.0);
        auto& slot = best[report.persistence_set()];
        if (m > slot.margin) {
            slot = {params, m};
        }
    }

    std::filesystem::create_directories(out_dir);
    int written = 0;
    for (std::size_t mask = 0; mask < (1u << strains); ++mask) {
        std::vector<std::size_t> set;
        for (std::size_t k = 0; k < strains; ++k) {
            if (mask & (1u << k)) {
                set.push_back(k);
            }
        }
        const auto name = pattern_name(set);
        const auto it = best.find(set);
        if (it == best.end() || it->second.margin < min_margin) {
            std::cout << format_persistence_set(set) << ": not found"
                      << (it == best.end() ? "" : " (best margin " + std::to_string(it->second.margin) + ")") << "\n";
            continue;
        }
        const auto report = run_cascade(it->second.params);
        if (!simulation_agrees(it->second.params, report)) {
            std::cout << format_persistence_set(set) << ": candidate rejected by simulation\n";
            continue;
        }
        RunConfig config;
        config.model = it->second.params;
        config.seeds = {1, 2, 3, 4, 5, 6, 7, 8, 9, 10};
        const auto path = out_dir + "/coexistence_" + name + ".json";
        std::ofstream(path) << serialize_config(config);
        std::cout << format_persistence_set(set) << ": margin " << it->second.margin << " -> " << path << "\n";
        ++written;
    }
    return written > 0 ? 0 : 1;
}

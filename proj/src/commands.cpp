#include "strain_cascade/commands.hpp"
#include "strain_cascade/errors.hpp"
#include "strain_cascade/simulate.hpp"

#include "CLI11.hpp"
#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <random>
#include <regex>
#include <sstream>
#include <thread>

namespace strain_cascade
{

using json = nlohmann::ordered_json;

std::size_t worker_count()
{
    if (const char* env = std::getenv("STRAIN_CASCADE_THREADS")) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (end != env && *end == '\0' && v > 0) {
            return static_cast<std::size_t>(v);
        }
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

void parallel_for(std::size_t count, std::size_t workers, const std::function<void(std::size_t)>& job)
{
    workers = std::max<std::size_t>(1, std::min(workers, count));
    if (workers <= 1) {
        for (std::size_t i = 0; i < count; ++i) {
            job(i);
        }
        return;
    }
    std::atomic<std::size_t> next{0};
    std::vector<std::jthread> pool;
    std::exception_ptr failure;
    std::mutex failure_mutex;
    for (std::size_t w = 0; w < workers; ++w) {
        pool.emplace_back([&] {
            for (std::size_t i = next++; i < count; i = next++) {
                try {
                    job(i);
                } catch (...) {
                    std::lock_guard lock(failure_mutex);
                    if (!failure) {
                        failure = std::current_exception();
                    }
                }
            }
        });
    }
    pool.clear();
    if (failure) {
        std::rethrow_exception(failure);
    }
}

StateVector random_initial_state(const ModelParameters& params, const std::vector<double>& total_population,
                                 std::uint64_t seed)
{
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> log_factor(std::log(1e-3), std::log(10.0));
    StateVector x(params.patches, params.strains);
    for (std::size_t l = 0; l < params.patches; ++l) {
        x.susceptible(l) = total_population[l] * std::exp(log_factor(rng));
        for (std::size_t k = 0; k < params.strains; ++k) {
            x.infected(l, k) = total_population[l] * std::exp(log_factor(rng));
        }
    }
    return x;
}

double equilibrium_residual(const ModelParameters& params, const EquilibriumPoint& E)
{
    double r = 0.0;
    for (double v : rhs(params, E.to_state())) {
        r = std::max(r, std::abs(v));
    }
    return r;
}

std::string format_persistence_set(const std::vector<std::size_t>& set)
{
    std::string out = "{";
    for (std::size_t i = 0; i < set.size(); ++i) {
        if (i > 0) {
            out += ",";
        }
        out += std::to_string(set[i] + 1);
    }
    return out + "}";
}

namespace
{

std::string fmt(double v, int digits = 17)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.*g", digits, v);
    return buf;
}

json persistence_labels(const std::vector<std::size_t>& set)
{
    json arr = json::array();
    for (auto k : set) {
        arr.push_back(k + 1);
    }
    return arr;
}

// Largest relative difference between the two equilibria.
double equilibrium_difference(const EquilibriumPoint& a, const EquilibriumPoint& b)
{
    return relative_distance(a.to_state(), b);
}

bool single_patch_agrees(const CascadeReport& report, const SinglePatchResult& sp)
{
    if (report.persistence_set() != [&] {
            std::vector<std::size_t> set;
            for (const auto& e : sp.sequence.entries) {
                if (e.value > 1.0) {
                    set.push_back(e.strain);
                }
            }
            std::sort(set.begin(), set.end());
            return set;
        }()) {
        return false;
    }
    for (std::size_t i = 0; i < report.verdicts.size(); ++i) {
        const bool persists = report.verdicts[i].threshold > 0.0;
        if (persists != (sp.sequence.entries[i].value > 1.0)) {
            return false;
        }
    }
    return equilibrium_difference(sp.equilibrium, report.equilibrium) <= 1e-10;
}

void ensure_directory(const std::string& dir)
{
    std::filesystem::create_directories(dir.empty() ? "." : dir);
}

std::string join_path(const std::string& dir, const std::string& file)
{
    return (std::filesystem::path(dir.empty() ? "." : dir) / file).string();
}

void write_file(const std::string& path, const std::string& content)
{
    std::ofstream f(path, std::ios::binary);
    if (!f) {
        throw Error("cannot write " + path);
    }
    f << content;
}

bool report_violations(const ModelParameters& params, std::ostream& err)
{
    const auto violations = validate(params);
    for (const auto& v : violations) {
        err << "violation: " << v.to_string() << '\n';
    }
    return violations.empty();
}

} // namespace

std::string report_json(const ModelParameters& params, const CascadeReport& report,
                        const SinglePatchResult* single_patch)
{
    json doc;
    doc["patches"] = params.patches;
    doc["strains"] = params.strains;
    doc["disease_free"] = report.disease_free();
    doc["persistence_set"] = persistence_labels(report.persistence_set());

    json thresholds = json::array();
    json verdicts = json::array();
    for (const auto& v : report.verdicts) {
        thresholds.push_back({{"strain", v.strain + 1}, {"s", v.threshold}});
        verdicts.push_back({{"strain", v.strain + 1},
                            {"threshold", v.threshold},
                            {"persists", v.persists},
                            {"near_threshold", v.near_threshold},
                            {"weak_persistence", v.weak_persistence},
                            {"levels", v.levels},
                            {"total_population_limit", v.total_population_limit},
                            {"growth_rates", v.growth_rates},
                            {"eigenvector", v.eigenvector}});
    }
    doc["thresholds"] = thresholds;
    doc["verdicts"] = verdicts;

    json coeffs = json::array();
    for (const auto& c : report.coefficients) {
        coeffs.push_back({{"step", c.step}, {"death", c.death}, {"birth", c.birth}});
    }
    doc["coefficients"] = coeffs;
    doc["equilibrium"] = {{"susceptible", report.equilibrium.susceptible},
                          {"infected", report.equilibrium.infected}};
    doc["equilibrium_residual"] = equilibrium_residual(params, report.equilibrium);

    if (single_patch != nullptr) {
        json r0 = json::array();
        for (const auto& e : single_patch->sequence.entries) {
            r0.push_back({{"strain", e.strain + 1},
                          {"r0", e.value},
                          {"level", e.level},
                          {"birth", e.birth},
                          {"death", e.death}});
        }
        doc["single_patch"] = {
            {"r0_sequence", r0},
            {"equilibrium",
             {{"susceptible", single_patch->equilibrium.susceptible},
              {"infected", single_patch->equilibrium.infected}}},
            {"max_equilibrium_difference", equilibrium_difference(single_patch->equilibrium, report.equilibrium)},
            {"agrees", single_patch_agrees(report, *single_patch)}};
    }
    return doc.dump(2) + "\n";
}

std::string report_text(const ModelParameters& params, const CascadeReport& report,
                        const SinglePatchResult* single_patch)
{
    std::ostringstream out;
    out << "patches: " << params.patches << "  strains: " << params.strains << '\n';
    out << "outcome: "
        << (report.disease_free() ? std::string("disease-free")
                                  : "persisting strains " + format_persistence_set(report.persistence_set()))
        << '\n';
    out << "thresholds (most virulent first):\n";
    for (const auto& v : report.verdicts) {
        out << "  s(M_" << v.strain + 1 << ") = " << fmt(v.threshold, 12) << "  "
            << (v.persists ? "persists" : "extinct");
        if (v.near_threshold) {
            out << "  [near-threshold]";
        }
        if (v.weak_persistence) {
            out << "  [weak persistence]";
        }
        out << '\n';
    }
    out << "coefficient trail:\n";
    for (const auto& c : report.coefficients) {
        out << "  step " << c.step << ":";
        for (std::size_t l = 0; l < c.death.size(); ++l) {
            out << "  patch " << l + 1 << " b=" << fmt(c.death[l], 10) << " B=" << fmt(c.birth[l], 10);
        }
        out << '\n';
    }
    out << "equilibrium:\n";
    for (std::size_t l = 0; l < params.patches; ++l) {
        out << "  patch " << l + 1 << ": S=" << fmt(report.equilibrium.susceptible[l], 12);
        for (std::size_t k = 0; k < params.strains; ++k) {
            out << " T_" << k + 1 << "=" << fmt(report.equilibrium.infected[l][k], 12);
        }
        out << '\n';
    }
    out << "equilibrium residual: " << fmt(equilibrium_residual(params, report.equilibrium), 6) << '\n';
    if (single_patch != nullptr) {
        out << "single-patch reproduction numbers:\n";
        for (const auto& e : single_patch->sequence.entries) {
            out << "  R0(" << e.strain + 1 << ") = " << fmt(e.value, 12) << '\n';
        }
        out << "single-patch agreement: " << (single_patch_agrees(report, *single_patch) ? "yes" : "NO")
            << " (max difference " << fmt(equilibrium_difference(single_patch->equilibrium, report.equilibrium), 3)
            << ")\n";
    }
    return out.str();
}

std::vector<double> SweepAxis::grid() const
{
    std::vector<double> values;
    values.reserve(steps);
    for (std::size_t i = 0; i < steps; ++i) {
        values.push_back(steps == 1 ? start
                                    : start + (stop - start) * static_cast<double>(i) / static_cast<double>(steps - 1));
    }
    return values;
}

SweepAxis parse_axis(const std::string& spec)
{
    static const std::regex pattern(R"(^\s*([A-Za-z_]+(?:\[(?:\d+|\*)\])*)\s*=\s*([^:]+):([^:]+):(\d+)\s*$)");
    std::smatch m;
    if (!std::regex_match(spec, m, pattern)) {
        throw ConfigError({"axis '" + spec + "': expected <param>=<start>:<stop>:<steps>"});
    }
    SweepAxis axis;
    axis.parameter = m[1];
    try {
        std::size_t used = 0;
        axis.start = std::stod(m[2], &used);
        axis.stop = std::stod(m[3], &used);
        axis.steps = std::stoul(m[4]);
    } catch (const std::exception&) {
        throw ConfigError({"axis '" + spec + "': grid bounds are not numbers"});
    }
    if (!std::isfinite(axis.start) || !std::isfinite(axis.stop)) {
        throw ConfigError({"axis '" + spec + "': grid bounds must be finite"});
    }
    return axis;
}

void apply_parameter(ModelParameters& params, const std::string& path, double value)
{
    static const std::regex head(R"(^([A-Za-z_]+)((?:\[(?:\d+|\*)\])*)$)");
    static const std::regex index_re(R"(\[(\d+|\*)\])");
    std::smatch m;
    if (!std::regex_match(path, m, head)) {
        throw ConfigError({"parameter path '" + path + "' is malformed"});
    }
    const std::string name = m[1];
    const std::string tail = m[2];
    std::vector<std::optional<std::size_t>> index;
    for (auto it = std::sregex_iterator(tail.begin(), tail.end(), index_re); it != std::sregex_iterator(); ++it) {
        const std::string token = (*it)[1];
        index.push_back(token == "*" ? std::nullopt : std::optional<std::size_t>(std::stoul(token)));
    }
    auto range = [&](const std::optional<std::size_t>& i, std::size_t extent) {
        std::vector<std::size_t> out;
        if (!i) {
            for (std::size_t j = 0; j < extent; ++j) {
                out.push_back(j);
            }
        } else if (*i < extent) {
            out.push_back(*i);
        } else {
            throw ConfigError({"parameter path '" + path + "': index out of range"});
        }
        return out;
    };
    const std::size_t p = params.patches;
    const std::size_t n = params.strains;
    if (name == "birth" || name == "death") {
        if (index.size() != 1) {
            throw ConfigError({"parameter path '" + path + "': expected one index"});
        }
        auto& target = name == "birth" ? params.birth : params.death;
        for (auto l : range(index[0], p)) {
            target[l] = value;
        }
    } else if (name == "beta_diag" || name == "theta") {
        if (index.size() != 2) {
            throw ConfigError({"parameter path '" + path + "': expected two indices"});
        }
        auto& target = name == "beta_diag" ? params.beta_diag : params.theta;
        for (auto l : range(index[0], p)) {
            for (auto k : range(index[1], n)) {
                target[l][k] = value;
            }
        }
    } else if (name == "migration") {
        if (index.size() != 2) {
            throw ConfigError({"parameter path '" + path + "': expected two indices"});
        }
        if (index[0] && index[1] && *index[0] == *index[1]) {
            throw ConfigError({"parameter path '" + path + "': migration diagonal is fixed at zero"});
        }
        for (auto l : range(index[0], p)) {
            for (auto i : range(index[1], p)) {
                if (l != i) {
                    params.migration[l][i] = value;
                }
            }
        }
    } else {
        throw ConfigError({"parameter path '" + path + "': unknown parameter '" + name + "'"});
    }
}

int cmd_validate(const RunConfig& config, std::ostream& out, std::ostream& err)
{
    if (!report_violations(config.model, err)) {
        return exit_validation_error;
    }
    out << "ok\n";
    return exit_success;
}

int cmd_thresholds(const RunConfig& config, const std::string& out_dir, std::ostream& out, std::ostream& err)
{
    if (!report_violations(config.model, err)) {
        return exit_validation_error;
    }
    CascadeReport report;
    std::optional<SinglePatchResult> sp;
    try {
        report = run_cascade(config.model);
        if (config.model.patches == 1) {
            sp = r0_cascade(config.model);
        }
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return exit_numeric_failure;
    }
    const SinglePatchResult* spp = sp ? &*sp : nullptr;
    const std::string text = report_text(config.model, report, spp);
    ensure_directory(out_dir);
    write_file(join_path(out_dir, "report.json"), report_json(config.model, report, spp));
    write_file(join_path(out_dir, "report.txt"), text);
    out << text;
    return exit_success;
}

namespace
{

StateVector read_initial_state(const std::string& path, const ModelParameters& params)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError({path + ": cannot open initial state file"});
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError({path + ": " + e.what()});
    }
    StateVector x(params.patches, params.strains);
    try {
        const auto S = doc.at("susceptible").get<std::vector<double>>();
        const auto T = doc.at("infected").get<std::vector<std::vector<double>>>();
        if (S.size() != params.patches || T.size() != params.patches) {
            throw ConfigError({path + ": patch count does not match the config"});
        }
        for (std::size_t l = 0; l < params.patches; ++l) {
            if (T[l].size() != params.strains) {
                throw ConfigError({path + ": strain count does not match the config"});
            }
            x.susceptible(l) = S[l];
            for (std::size_t k = 0; k < params.strains; ++k) {
                x.infected(l, k) = T[l][k];
            }
        }
    } catch (const json::exception& e) {
        throw ConfigError({path + ": expected {\"susceptible\": [...], \"infected\": [[...]]}: " + e.what()});
    }
    for (double v : x.values()) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw ConfigError({path + ": initial state must be finite and nonnegative"});
        }
    }
    return x;
}

} // namespace

int cmd_simulate(const RunConfig& config, const SimulateOptions& options, const std::string& out_dir,
                 std::ostream& out, std::ostream& err)
{
    if (!report_violations(config.model, err)) {
        return exit_validation_error;
    }
    CascadeReport report;
    try {
        report = run_cascade(config.model);
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return exit_numeric_failure;
    }
    StateVector initial;
    try {
        initial = options.initial_file
                      ? read_initial_state(*options.initial_file, config.model)
                      : random_initial_state(config.model, report.verdicts.front().total_population_limit,
                                             options.seed.value_or(config.seeds.front()));
    } catch (const ConfigError& e) {
        for (const auto& p : e.problems()) {
            err << "violation: " << p << '\n';
        }
        return exit_validation_error;
    }

    const Trajectory traj = integrate(config.model, initial, config.integrator);
    ensure_directory(out_dir);
    {
        std::ofstream csv(join_path(out_dir, "trajectory.csv"), std::ios::binary);
        write_trajectory_csv(csv, traj);
    }
    const double distance = relative_distance(traj.final_state(), report.equilibrium);
    out << "status: " << to_string(traj.status) << '\n';
    out << "final time: " << fmt(traj.times.back(), 12) << '\n';
    out << "steps: " << traj.accepted_steps << " accepted, " << traj.rejected_steps << " rejected\n";
    out << "distance to cascade equilibrium: " << fmt(distance, 6) << '\n';
    if (traj.status == TrajectoryStatus::failed) {
        err << "integrator failure: " << traj.failure << " (last good time " << fmt(traj.times.back(), 12) << ")\n";
        return exit_numeric_failure;
    }
    if (traj.status == TrajectoryStatus::max_time) {
        err << "warning: max_time reached before the convergence window criterion held\n";
    }
    return exit_success;
}

int cmd_verify(const RunConfig& config, const VerifyOptions& options, const std::string& out_dir, std::ostream& out,
               std::ostream& err)
{
    if (!report_violations(config.model, err)) {
        return exit_validation_error;
    }
    if (config.seeds.empty()) {
        err << "violation: seeds: must not be empty\n";
        return exit_validation_error;
    }
    CascadeReport report;
    try {
        report = run_cascade(config.model);
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return exit_numeric_failure;
    }
    const EquilibriumPoint target = options.target_override.value_or(report.equilibrium);
    const auto& total = report.verdicts.front().total_population_limit;

    struct Row {
        double distance = 0.0;
        double time_to_converge = -1.0;
        TrajectoryStatus status = TrajectoryStatus::failed;
        bool passed = false;
        std::string failure;
    };
    std::vector<Row> rows(config.seeds.size());
    parallel_for(rows.size(), worker_count(), [&](std::size_t i) {
        const auto x0 = random_initial_state(config.model, total, config.seeds[i]);
        const Trajectory traj = integrate(config.model, x0, config.integrator);
        Row& row = rows[i];
        row.status = traj.status;
        row.failure = traj.failure;
        row.distance = relative_distance(traj.final_state(), target);
        row.passed = converged_to(traj, target, config.verify_eps);
        for (std::size_t j = traj.states.size(); j-- > 0;) {
            if (!(relative_distance(traj.states[j], target) <= config.verify_eps)) {
                break;
            }
            row.time_to_converge = traj.times[j];
        }
    });

    ensure_directory(out_dir);
    std::ostringstream csv;
    csv << "seed,terminal_distance,time_to_converge,status,passed\n";
    int code = exit_success;
    for (std::size_t i = 0; i < rows.size(); ++i) {
        const Row& r = rows[i];
        csv << config.seeds[i] << ',' << fmt(r.distance) << ',' << fmt(r.time_to_converge) << ','
            << to_string(r.status) << ',' << (r.passed ? "true" : "false") << '\n';
        if (r.status == TrajectoryStatus::failed) {
            err << "seed " << config.seeds[i] << ": integrator failure: " << r.failure << '\n';
            code = exit_numeric_failure;
        } else if (!r.passed && code == exit_success) {
            err << "seed " << config.seeds[i] << ": did not converge to the target (distance " << fmt(r.distance, 6)
                << ")\n";
            code = exit_verification_failure;
        } else if (!r.passed) {
            err << "seed " << config.seeds[i] << ": did not converge to the target (distance " << fmt(r.distance, 6)
                << ")\n";
        }
    }
    write_file(join_path(out_dir, "verify.csv"), csv.str());
    const auto passed = std::count_if(rows.begin(), rows.end(), [](const Row& r) { return r.passed; });
    out << "verify: " << passed << "/" << rows.size() << " runs converged to the cascade equilibrium ("
        << (code == exit_success ? "pass" : "FAIL") << ")\n";
    return code;
}

int cmd_sweep(const RunConfig& config, const SweepAxis& axis, const std::string& out_dir, std::ostream& out,
              std::ostream& err)
{
    if (!report_violations(config.model, err)) {
        return exit_validation_error;
    }
    try {
        ModelParameters probe = config.model;
        apply_parameter(probe, axis.parameter, axis.start);
    } catch (const ConfigError& e) {
        err << "violation: " << e.what() << '\n';
        return exit_validation_error;
    }

    const std::size_t n = config.model.strains;
    const auto grid = axis.grid();
    std::vector<std::string> rows(grid.size());
    parallel_for(grid.size(), worker_count(), [&](std::size_t i) {
        std::ostringstream row;
        row << fmt(grid[i]);
        ModelParameters params = config.model;
        apply_parameter(params, axis.parameter, grid[i]);
        std::string failure;
        CascadeReport report;
        if (const auto violations = validate(params); !violations.empty()) {
            failure = "invalid: " + violations.front().to_string();
        } else {
            try {
                report = run_cascade(params);
            } catch (const Error& e) {
                failure = std::string("error: ") + e.what();
            }
        }
        if (!failure.empty()) {
            for (std::size_t k = 0; k < n; ++k) {
                row << ",nan";
            }
            std::replace(failure.begin(), failure.end(), '"', '\'');
            row << ",\"" << failure << '"';
        } else {
            for (const auto& v : report.verdicts) {
                row << ',' << fmt(v.threshold);
            }
            row << ",\"" << format_persistence_set(report.persistence_set()) << '"';
        }
        rows[i] = row.str();
    });

    std::ostringstream csv;
    csv << "value";
    for (std::size_t k = n; k >= 1; --k) {
        csv << ",s_M_" << k;
    }
    csv << ",persistence_set\n";
    for (const auto& r : rows) {
        csv << r << '\n';
    }
    ensure_directory(out_dir);
    write_file(join_path(out_dir, "sweep.csv"), csv.str());
    out << "sweep: " << grid.size() << " points over " << axis.parameter << '\n';
    return exit_success;
}

int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Threshold cascade and simulation for the multistrain, multipatch SIS model with superinfection",
                 "strain-cascade"};
    app.require_subcommand(1);

    std::string config_path;
    std::string out_dir;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> initial;
    std::string axis_spec;

    auto add_common = [&](CLI::App* sub) {
        sub->add_option("--config", config_path, "Config JSON")->required();
        sub->add_option("--out", out_dir, "Output directory (overrides outputs.directory)");
    };
    auto* validate_cmd = app.add_subcommand("validate", "Check the config and model parameters");
    add_common(validate_cmd);
    auto* thresholds_cmd = app.add_subcommand("thresholds", "Run the threshold cascade and write the report");
    add_common(thresholds_cmd);
    auto* simulate_cmd = app.add_subcommand("simulate", "Integrate the model and write the trajectory");
    add_common(simulate_cmd);
    simulate_cmd->add_option("--seed", seed, "Seed for a random positive initial state");
    simulate_cmd->add_option("--initial", initial, "Initial state JSON file");
    auto* verify_cmd = app.add_subcommand("verify", "Check convergence to the cascade equilibrium for every seed");
    add_common(verify_cmd);
    verify_cmd->add_option("--seed", seed, "Verify this seed only");
    auto* sweep_cmd = app.add_subcommand("sweep", "Re-run the cascade across a parameter grid");
    add_common(sweep_cmd);
    sweep_cmd->add_option("--axis", axis_spec, "<param>=<start>:<stop>:<steps>")->required();

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        std::ostringstream o;
        std::ostringstream eo;
        const int rc = app.exit(e, o, eo);
        out << o.str();
        err << eo.str();
        return rc == 0 ? exit_success : exit_validation_error;
    }

    RunConfig config;
    try {
        config = parse_config(config_path);
    } catch (const ConfigError& e) {
        for (const auto& p : e.problems()) {
            err << "violation: " << p << '\n';
        }
        return exit_validation_error;
    }
    const std::string dir = out_dir.empty() ? config.output_directory : out_dir;

    try {
        if (validate_cmd->parsed()) {
            return cmd_validate(config, out, err);
        }
        if (thresholds_cmd->parsed()) {
            return cmd_thresholds(config, dir, out, err);
        }
        if (simulate_cmd->parsed()) {
            return cmd_simulate(config, {initial, seed}, dir, out, err);
        }
        if (verify_cmd->parsed()) {
            if (seed) {
                config.seeds = {*seed};
            }
            return cmd_verify(config, {}, dir, out, err);
        }
        if (sweep_cmd->parsed()) {
            SweepAxis axis;
            try {
                axis = parse_axis(axis_spec);
            } catch (const ConfigError& e) {
                err << "violation: " << e.what() << '\n';
                return exit_validation_error;
            }
            return cmd_sweep(config, axis, dir, out, err);
        }
    } catch (const NumericError& e) {
        err << "numeric failure: " << e.what() << '\n';
        return exit_numeric_failure;
    } catch (const Error& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation_error;
    } catch (const std::filesystem::filesystem_error& e) {
        err << "error: " << e.what() << '\n';
        return exit_validation_error;
    }
    return exit_validation_error;
}

} // namespace strain_cascade

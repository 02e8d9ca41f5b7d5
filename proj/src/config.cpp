#include "strain_cascade/config.hpp"

#include "json.hpp"

#include <fstream>
#include <set>
#include <sstream>

namespace strain_cascade
{

using json = nlohmann::ordered_json;

namespace
{

std::string join(const std::vector<std::string>& lines)
{
    std::string out;
    for (const auto& l : lines) {
        if (!out.empty()) {
            out += "; ";
        }
        out += l;
    }
    return out;
}

// Maps a byte offset to "line L, column C".
std::string position_of(const std::string& text, std::size_t byte)
{
    std::size_t line = 1;
    std::size_t col = 1;
    for (std::size_t i = 0; i < byte && i < text.size(); ++i) {
        if (text[i] == '\n') {
            ++line;
            col = 1;
        } else {
            ++col;
        }
    }
    return "line " + std::to_string(line) + ", column " + std::to_string(col);
}

class SchemaReader
{
public:
    std::vector<std::string> problems;

    void reject_unknown(const json& obj, const std::string& where, const std::set<std::string>& allowed)
    {
        for (auto it = obj.begin(); it != obj.end(); ++it) {
            if (!allowed.count(it.key())) {
                problems.push_back(where + ": unknown key '" + it.key() + "'");
            }
        }
    }

    bool number(const json& v, const std::string& key, double& out)
    {
        if (!v.is_number()) {
            problems.push_back(key + ": expected a number");
            return false;
        }
        out = v.get<double>();
        return true;
    }

    bool count(const json& v, const std::string& key, std::size_t& out)
    {
        if (!v.is_number_integer() || v.get<std::int64_t>() < 0) {
            problems.push_back(key + ": expected a nonnegative integer");
            return false;
        }
        out = v.get<std::size_t>();
        return true;
    }

    void vector(const json& v, const std::string& key, std::vector<double>& out)
    {
        if (!v.is_array()) {
            problems.push_back(key + ": expected an array of numbers");
            return;
        }
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            double x = 0.0;
            if (number(v[i], key + "[" + std::to_string(i) + "]", x)) {
                out.push_back(x);
            }
        }
    }

    void matrix(const json& v, const std::string& key, std::vector<std::vector<double>>& out)
    {
        if (!v.is_array()) {
            problems.push_back(key + ": expected an array of arrays");
            return;
        }
        out.clear();
        for (std::size_t i = 0; i < v.size(); ++i) {
            out.emplace_back();
            vector(v[i], key + "[" + std::to_string(i) + "]", out.back());
        }
    }
};

} // namespace

ConfigError::ConfigError(std::vector<std::string> problems)
    : Error("config: " + join(problems))
    , m_problems(std::move(problems))
{
}

RunConfig parse_config_text(const std::string& text, const std::string& source)
{
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ConfigError({source + ": parse error at " + position_of(text, e.byte == 0 ? 0 : e.byte - 1) + ": " +
                           e.what()});
    }
    if (!doc.is_object()) {
        throw ConfigError({source + ": top level must be a JSON object"});
    }

    SchemaReader r;
    RunConfig cfg;
    r.reject_unknown(doc, source,
                     {"patches", "strains", "birth", "death", "beta_diag", "theta", "migration", "integrator", "seeds",
                      "verify_eps", "outputs"});

    for (const char* key : {"patches", "strains", "birth", "death", "beta_diag", "theta", "migration"}) {
        if (!doc.contains(key)) {
            r.problems.push_back(std::string(key) + ": required key missing");
        }
    }
    auto& m = cfg.model;
    if (doc.contains("patches")) {
        r.count(doc["patches"], "patches", m.patches);
    }
    if (doc.contains("strains")) {
        r.count(doc["strains"], "strains", m.strains);
    }
    if (doc.contains("birth")) {
        r.vector(doc["birth"], "birth", m.birth);
    }
    if (doc.contains("death")) {
        r.vector(doc["death"], "death", m.death);
    }
    if (doc.contains("beta_diag")) {
        r.matrix(doc["beta_diag"], "beta_diag", m.beta_diag);
    }
    if (doc.contains("theta")) {
        r.matrix(doc["theta"], "theta", m.theta);
    }
    if (doc.contains("migration")) {
        r.matrix(doc["migration"], "migration", m.migration);
    }

    if (doc.contains("integrator")) {
        const auto& integ = doc["integrator"];
        if (!integ.is_object()) {
            r.problems.push_back("integrator: expected an object");
        } else {
            r.reject_unknown(integ, "integrator",
                             {"rel_tol", "abs_tol", "max_time", "max_steps", "convergence_eps", "convergence_window",
                              "sample_interval", "stop_on_convergence"});
            auto& ic = cfg.integrator;
            const std::pair<const char*, double*> reals[] = {{"rel_tol", &ic.rel_tol},
                                                             {"abs_tol", &ic.abs_tol},
                                                             {"max_time", &ic.max_time},
                                                             {"convergence_eps", &ic.convergence_eps},
                                                             {"convergence_window", &ic.convergence_window},
                                                             {"sample_interval", &ic.sample_interval}};
            for (const auto& [key, target] : reals) {
                if (integ.contains(key)) {
                    r.number(integ[key], std::string("integrator.") + key, *target);
                }
            }
            if (integ.contains("max_steps")) {
                r.count(integ["max_steps"], "integrator.max_steps", ic.max_steps);
            }
            if (integ.contains("stop_on_convergence")) {
                if (!integ["stop_on_convergence"].is_boolean()) {
                    r.problems.push_back("integrator.stop_on_convergence: expected a boolean");
                } else {
                    ic.stop_on_convergence = integ["stop_on_convergence"].get<bool>();
                }
            }
            for (const auto& e : check_config(ic)) {
                r.problems.push_back("integrator." + e);
            }
        }
    }

    if (doc.contains("seeds")) {
        const auto& seeds = doc["seeds"];
        if (!seeds.is_array()) {
            r.problems.push_back("seeds: expected an array of nonnegative integers");
        } else {
            cfg.seeds.clear();
            for (std::size_t i = 0; i < seeds.size(); ++i) {
                if (!seeds[i].is_number_unsigned()) {
                    r.problems.push_back("seeds[" + std::to_string(i) + "]: expected a nonnegative integer");
                } else {
                    cfg.seeds.push_back(seeds[i].get<std::uint64_t>());
                }
            }
            if (cfg.seeds.empty()) {
                r.problems.push_back("seeds: must not be empty");
            }
        }
    }
    if (doc.contains("verify_eps")) {
        if (r.number(doc["verify_eps"], "verify_eps", cfg.verify_eps) && !(cfg.verify_eps > 0.0)) {
            r.problems.push_back("verify_eps: must be positive");
        }
    }
    if (doc.contains("outputs")) {
        const auto& out = doc["outputs"];
        if (!out.is_object()) {
            r.problems.push_back("outputs: expected an object");
        } else {
            r.reject_unknown(out, "outputs", {"directory"});
            if (out.contains("directory")) {
                if (!out["directory"].is_string()) {
                    r.problems.push_back("outputs.directory: expected a string");
                } else {
                    cfg.output_directory = out["directory"].get<std::string>();
                }
            }
        }
    }

    if (!r.problems.empty()) {
        throw ConfigError(std::move(r.problems));
    }
    return cfg;
}

RunConfig parse_config(const std::string& path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError({path + ": cannot open file"});
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config_text(text.str(), path);
}

std::string serialize_config(const RunConfig& config)
{
    const auto& m = config.model;
    const auto& ic = config.integrator;
    json doc;
    doc["patches"] = m.patches;
    doc["strains"] = m.strains;
    doc["birth"] = m.birth;
    doc["death"] = m.death;
    doc["beta_diag"] = m.beta_diag;
    doc["theta"] = m.theta;
    doc["migration"] = m.migration;
    doc["integrator"] = {{"rel_tol", ic.rel_tol},
                         {"abs_tol", ic.abs_tol},
                         {"max_time", ic.max_time},
                         {"max_steps", ic.max_steps},
                         {"convergence_eps", ic.convergence_eps},
                         {"convergence_window", ic.convergence_window},
                         {"sample_interval", ic.sample_interval},
                         {"stop_on_convergence", ic.stop_on_convergence}};
    doc["seeds"] = config.seeds;
    doc["verify_eps"] = config.verify_eps;
    doc["outputs"] = {{"directory", config.output_directory}};
    return doc.dump(2) + "\n";
}

} // namespace strain_cascade

#include "doctest.h"

#include "strain_cascade/commands.hpp"
#include "json.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace strain_cascade;
namespace fs = std::filesystem;

namespace
{

std::string fixture(const std::string& name)
{
    return std::string(FIXTURE_DIR) + "/" + name;
}

std::string scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "strain_cascade_tests" / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir.string();
}

std::string slurp(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

std::vector<std::string> lines(const std::string& text)
{
    std::vector<std::string> out;
    std::istringstream in(text);
    for (std::string line; std::getline(in, line);) {
        out.push_back(line);
    }
    return out;
}

int cli(std::vector<std::string> args, std::string* out_text = nullptr, std::string* err_text = nullptr)
{
    args.insert(args.begin(), "strain-cascade");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int rc = run_cli(static_cast<int>(argv.size()), argv.data(), out, err);
    if (out_text) {
        *out_text = out.str();
    }
    if (err_text) {
        *err_text = err.str();
    }
    return rc;
}

} // namespace

TEST_CASE("thresholds on the coexistence example")
{
    const auto dir = scratch("thr_worked");
    std::string out;
    REQUIRE(cli({"thresholds", "--config", fixture("worked_p1_n2.json"), "--out", dir}, &out) == exit_success);
    CHECK(out.find("persisting strains {1,2}") != std::string::npos);
    CHECK(out.find("single-patch agreement: yes") != std::string::npos);
    const auto doc = nlohmann::json::parse(slurp(dir + "/report.json"));
    CHECK(doc["persistence_set"] == nlohmann::json::array({1, 2}));
    CHECK(doc["equilibrium"]["susceptible"][0].get<double>() == doctest::Approx(0.2).epsilon(1e-14));
    CHECK(doc["equilibrium"]["infected"][0][0].get<double>() == doctest::Approx(0.3).epsilon(1e-14));
    CHECK(doc["equilibrium"]["infected"][0][1].get<double>() == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(doc["single_patch"]["agrees"] == true);
    CHECK(doc["thresholds"][0]["strain"] == 2);
    CHECK(fs::exists(dir + "/report.txt"));
}

TEST_CASE("thresholds on an extinction instance")
{
    const auto dir = scratch("thr_ext");
    std::string out;
    REQUIRE(cli({"thresholds", "--config", fixture("extinction_p2_n2.json"), "--out", dir}, &out) == exit_success);
    CHECK(out.find("outcome: disease-free") != std::string::npos);
    const auto doc = nlohmann::json::parse(slurp(dir + "/report.json"));
    CHECK(doc["disease_free"] == true);
    const auto& v = doc["verdicts"][0];
    for (std::size_t l = 0; l < 2; ++l) {
        CHECK(doc["equilibrium"]["susceptible"][l] == v["total_population_limit"][l]);
        CHECK(doc["equilibrium"]["infected"][l] == nlohmann::json::array({0.0, 0.0}));
    }
}

TEST_CASE("validation failures exit 2 with the violation text")
{
    std::string err;
    CHECK(cli({"thresholds", "--config", fixture("reducible_p2.json"), "--out", scratch("thr_red")}, nullptr, &err) ==
          exit_validation_error);
    CHECK(err.find("reducible connectivity") != std::string::npos);
    CHECK(cli({"validate", "--config", fixture("reducible_p2.json")}) == exit_validation_error);
    CHECK(cli({"validate", "--config", fixture("worked_p1_n2.json")}) == exit_success);
    CHECK(cli({"validate", "--config", "/nonexistent.json"}) == exit_validation_error);
    CHECK(cli({"frobnicate", "--config", fixture("worked_p1_n2.json")}) == exit_validation_error);
}

TEST_CASE("simulate from a seeded initial state")
{
    const auto dir = scratch("sim_seed");
    std::string out;
    REQUIRE(cli({"simulate", "--config", fixture("worked_p1_n2.json"), "--seed", "7", "--out", dir}, &out) ==
            exit_success);
    CHECK(out.find("status: converged") != std::string::npos);
    const auto csv = lines(slurp(dir + "/trajectory.csv"));
    CHECK(csv.front() == "t,S_1,T_1_1,T_1_2");

    const auto cfg = parse_config(fixture("worked_p1_n2.json"));
    const auto E = run_cascade(cfg.model).equilibrium;
    std::istringstream last(csv.back());
    std::vector<double> row;
    for (std::string cell; std::getline(last, cell, ',');) {
        row.push_back(std::stod(cell));
    }
    CHECK(relative_distance(StateVector(1, 2, {row[1], row[2], row[3]}), E) < 1e-5);
}

TEST_CASE("simulate starting at the equilibrium")
{
    const auto dir = scratch("sim_eq");
    {
        std::ofstream f(dir + "/initial.json");
        f << R"({"susceptible": [0.2], "infected": [[0.3, 0.5]]})";
    }
    std::string out;
    REQUIRE(cli({"simulate", "--config", fixture("worked_p1_n2.json"), "--initial", dir + "/initial.json", "--out",
                 dir},
                &out) == exit_success);
    CHECK(out.find("status: converged") != std::string::npos);
    const auto pos = out.find("distance to cascade equilibrium: ");
    REQUIRE(pos != std::string::npos);
    CHECK(std::stod(out.substr(pos + 33)) < 1e-7);

    std::ofstream(dir + "/bad.json") << R"({"susceptible": [0.2]})";
    CHECK(cli({"simulate", "--config", fixture("worked_p1_n2.json"), "--initial", dir + "/bad.json", "--out", dir}) ==
          exit_validation_error);
}

TEST_CASE("simulate with a short horizon warns and exits 0")
{
    auto cfg = parse_config(fixture("worked_p1_n2.json"));
    cfg.integrator.max_time = 2.0;
    std::ostringstream out, err;
    CHECK(cmd_simulate(cfg, {std::nullopt, 3}, scratch("sim_short"), out, err) == exit_success);
    CHECK(out.str().find("status: max_time") != std::string::npos);
    CHECK(err.str().find("warning") != std::string::npos);
}

TEST_CASE("verify passes on the worked and symmetric examples")
{
    for (const char* name : {"worked_p1_n2.json", "symmetric_p2_n1.json"}) {
        CAPTURE(name);
        const auto dir = scratch(std::string("verify_") + name);
        std::string out;
        CHECK(cli({"verify", "--config", fixture(name), "--out", dir}, &out) == exit_success);
        CHECK(out.find("20/20") != std::string::npos);
        CHECK(lines(slurp(dir + "/verify.csv")).size() == 21);
    }
}

TEST_CASE("verify fails against a wrong target")
{
    const auto cfg = parse_config(fixture("worked_p1_n2.json"));
    VerifyOptions options;
    options.target_override = EquilibriumPoint{{1.0}, {{0.0, 0.0}}};
    std::ostringstream out, err;
    CHECK(cmd_verify(cfg, options, scratch("verify_wrong"), out, err) == exit_verification_failure);
    CHECK(err.str().find("seed 1") != std::string::npos);
}

TEST_CASE("sweep across the strain-2 threshold flips the persistence set")
{
    // Independent bisection on the sign of beta * B/b - (b + theta) for strain 2.
    const auto cfg = parse_config(fixture("worked_p1_n2.json"));
    double lo = 0.5, hi = 4.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        (mid * (1.0 / 1.0) - (1.0 + 1.0) > 0.0 ? hi : lo) = mid;
    }
    const double crossing = hi;
    CHECK(crossing == doctest::Approx(2.0).epsilon(1e-12));

    const auto dir = scratch("sweep_beta");
    REQUIRE(cli({"sweep", "--config", fixture("worked_p1_n2.json"), "--axis", "beta_diag[0][1]=1.05:3.05:21", "--out",
                 dir}) == exit_success);
    const auto rows = lines(slurp(dir + "/sweep.csv"));
    REQUIRE(rows.size() == 22);
    CHECK(rows[0] == "value,s_M_2,s_M_1,persistence_set");
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double value = std::stod(rows[i]);
        const bool above = value > crossing;
        CHECK(rows[i].ends_with(above ? "\"{1,2}\"" : "\"{1}\""));
    }
}

TEST_CASE("sweeping symmetric migration leaves thresholds unchanged")
{
    const auto dir = scratch("sweep_mig");
    REQUIRE(cli({"sweep", "--config", fixture("symmetric_p2_n1.json"), "--axis", "migration[*][*]=0.01:10:7", "--out",
                 dir}) == exit_success);
    const auto rows = lines(slurp(dir + "/sweep.csv"));
    REQUIRE(rows.size() == 8);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        std::istringstream in(rows[i]);
        std::string value, s;
        std::getline(in, value, ',');
        std::getline(in, s, ',');
        CHECK(std::stod(s) == doctest::Approx(3.0 * 1.0 - 2.0).epsilon(1e-12));
    }
}

TEST_CASE("empty sweep grid and per-point failures")
{
    const auto dir = scratch("sweep_empty");
    REQUIRE(cli({"sweep", "--config", fixture("worked_p1_n2.json"), "--axis", "birth[0]=1:2:0", "--out", dir}) ==
            exit_success);
    CHECK(slurp(dir + "/sweep.csv") == "value,s_M_2,s_M_1,persistence_set\n");

    REQUIRE(cli({"sweep", "--config", fixture("worked_p1_n2.json"), "--axis", "theta[0][0]=-1:1:3", "--out", dir}) ==
            exit_success);
    const auto rows = lines(slurp(dir + "/sweep.csv"));
    REQUIRE(rows.size() == 4);
    CHECK(rows[1] == "-1,nan,nan,\"invalid: theta[0][0]: must be >= 0\"");
    CHECK(rows[2].ends_with("\"{1,2}\""));

    CHECK(cli({"sweep", "--config", fixture("worked_p1_n2.json"), "--axis", "gamma[0]=1:2:3", "--out", dir}) ==
          exit_validation_error);
    CHECK(cli({"sweep", "--config", fixture("worked_p1_n2.json"), "--axis", "birth[0]=1:2", "--out", dir}) ==
          exit_validation_error);
}

TEST_CASE("apply_parameter addresses entries and wildcards")
{
    auto cfg = parse_config(fixture("symmetric_p2_n1.json"));
    apply_parameter(cfg.model, "migration[*][*]", 2.0);
    CHECK(cfg.model.migration == std::vector<std::vector<double>>{{0.0, 2.0}, {2.0, 0.0}});
    apply_parameter(cfg.model, "beta_diag[1][0]", 7.0);
    CHECK(cfg.model.beta_diag[1][0] == 7.0);
    CHECK_THROWS_AS(apply_parameter(cfg.model, "migration[1][1]", 1.0), ConfigError);
    CHECK_THROWS_AS(apply_parameter(cfg.model, "death[5]", 1.0), ConfigError);
    CHECK_THROWS_AS(apply_parameter(cfg.model, "death", 1.0), ConfigError);
}

TEST_CASE("outputs are byte-identical across runs and thread counts")
{
    const auto a = scratch("det_a");
    const auto b = scratch("det_b");
    const auto cfg = parse_config(fixture("symmetric_p2_n1.json"));
    std::ostringstream sink;
    REQUIRE(cmd_thresholds(cfg, a, sink, sink) == exit_success);
    REQUIRE(cmd_thresholds(cfg, b, sink, sink) == exit_success);
    REQUIRE(cmd_verify(cfg, {}, a, sink, sink) == exit_success);
    setenv("STRAIN_CASCADE_THREADS", "1", 1);
    REQUIRE(cmd_verify(cfg, {}, b, sink, sink) == exit_success);
    unsetenv("STRAIN_CASCADE_THREADS");
    for (const char* f : {"report.json", "report.txt", "verify.csv"}) {
        CHECK(slurp(a + "/" + f) == slurp(b + "/" + f));
    }
}

TEST_CASE("worker count honours the environment")
{
    setenv("STRAIN_CASCADE_THREADS", "3", 1);
    CHECK(worker_count() == 3);
    setenv("STRAIN_CASCADE_THREADS", "zero", 1);
    CHECK(worker_count() >= 1);
    unsetenv("STRAIN_CASCADE_THREADS");
}

#include "catch_amalgamated.hpp"

#include <sys/wait.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "sodexo/config.hpp"
#include "sodexo/error.hpp"

namespace fs = std::filesystem;
using namespace sodexo;

namespace {

const fs::path config_dir = SODEXO_CONFIG_DIR;

fs::path scratch(const std::string& name) {
    auto dir = fs::temp_directory_path() / ("sodexo_cli_test_" + std::to_string(::getpid())) / name;
    fs::remove_all(dir);
    fs::create_directories(dir);
    return dir;
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

void write(const fs::path& p, const std::string& text) {
    std::ofstream(p, std::ios::binary) << text;
}

struct Outcome {
    int code = -1;
    std::string err;
};

Outcome run_cli(const std::string& args, const fs::path& work, const std::string& env = "") {
    const auto err_file = work / "stderr.txt";
    const std::string cmd = env + " \"" SODEXO_CLI_PATH "\" " + args + " --quiet 2> \"" +
                            err_file.string() + "\"";
    const int status = std::system(cmd.c_str());
    Outcome o;
    o.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    o.err = slurp(err_file);
    return o;
}

std::vector<std::string> csv_files(const fs::path& dir) {
    std::vector<std::string> out;
    for (const auto& e : fs::directory_iterator(dir))
        if (e.path().extension() == ".csv") out.push_back(e.path().filename().string());
    std::sort(out.begin(), out.end());
    return out;
}

void check_finite_cells(const fs::path& file) {
    std::ifstream in(file);
    std::string line;
    REQUIRE(std::getline(in, line)); // header
    while (std::getline(in, line)) {
        std::stringstream row(line);
        std::string cell;
        while (std::getline(row, cell, ',')) {
            INFO(file.filename().string() << ": " << line);
            char* end = nullptr;
            const double v = std::strtod(cell.c_str(), &end);
            REQUIRE(end != cell.c_str());
            REQUIRE(std::isfinite(v));
        }
    }
}

const char* minimal_ode = R"({
  "scenario": "ode",
  "population": { "click_prob": 0.01, "clean_rate": 0.2 }
})";

} // namespace

TEST_CASE("config parsing", "[cli][config]") {
    SECTION("minimal ode config") {
        const auto c = config::parse_config_text(minimal_ode);
        CHECK(c.kind == config::ScenarioKind::ode);
        CHECK(c.population.n_users == 1'000'000);
        CHECK(c.population.clean_rate == 0.2);
    }
    SECTION("click probability out of range") {
        const std::string text = R"({"scenario": "ode", "population": {"click_prob": 1.5}})";
        try {
            config::parse_config_text(text);
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("click_prob out of (0,1]"));
        }
    }
    SECTION("unknown key") {
        const std::string text = R"({"scenario": "ode", "population": {"mu3": 0.1}})";
        try {
            config::parse_config_text(text);
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("mu3"));
        }
    }
    SECTION("syntax error position") {
        const std::string text = "{\n  \"scenario\": \"ode\",\n  \"seed\": ,\n}";
        try {
            config::parse_config_text(text);
            FAIL("expected a ConfigError");
        } catch (const ConfigError& e) {
            CHECK_THAT(e.what(), Catch::Matchers::ContainsSubstring("line 3, column 11"));
        }
    }
    SECTION("wrong type names the path") {
        const std::string text = R"({"scenario": "ode", "ode": {"step": "fast"}})";
        CHECK_THROWS_WITH(config::parse_config_text(text), Catch::Matchers::ContainsSubstring("ode.step"));
    }
    SECTION("every shipped config parses") {
        for (const auto& e : fs::directory_iterator(config_dir)) {
            INFO(e.path().string());
            CHECK_NOTHROW(config::parse_config(e.path()));
        }
    }
}

TEST_CASE("exit codes and error reports", "[cli]") {
    const auto work = scratch("errors");
    SECTION("bad parameter") {
        write(work / "bad.json", R"({"scenario": "ode", "population": {"click_prob": 1.5}})");
        const auto o = run_cli("--config " + (work / "bad.json").string() + " --out " + (work / "o").string(), work);
        CHECK(o.code == 2);
        const auto j = nlohmann::json::parse(o.err);
        CHECK(j["error"]["exit_code"] == 2);
        CHECK(j["error"]["type"] == "config");
        CHECK_THAT(j["error"]["message"].get<std::string>(), Catch::Matchers::ContainsSubstring("click_prob"));
    }
    SECTION("missing config flag") {
        CHECK(run_cli("", work).code == 2);
    }
    SECTION("missing file") {
        CHECK(run_cli("--config " + (work / "absent.json").string(), work).code == 2);
    }
    SECTION("model error") {
        // Passes validation, but a zero-trust honeybot gets no commands whatever it does.
        write(work / "dead.json", R"({"scenario": "stackelberg",
          "stackelberg": {"subtree": {"bots": 2, "trust": 1, "response_rate": 1, "cost": 1,
                                      "capacity": 10, "alpha": 1},
                          "honeybot": {"beta": 1, "xi": 0, "trust": 0, "cost": 1}}})");
        const auto o = run_cli("--config " + (work / "dead.json").string() + " --out " + (work / "o").string(), work);
        CHECK(o.code == 3);
        const auto j = nlohmann::json::parse(o.err);
        CHECK(j["error"]["type"] == "model");
        CHECK(j["error"]["exit_code"] == 3);
    }
}

TEST_CASE("scenarios write complete, finite, reproducible outputs", "[cli]") {
    for (const char* name : {"ode_sweep.json", "stackelberg.json", "deploy.json", "abm_regular.json"}) {
        DYNAMIC_SECTION(name) {
            const auto work = scratch(std::string("run_") + name);
            const auto cfg = (config_dir / name).string();
            const auto a = work / "a", b = work / "b";
            REQUIRE(run_cli("--config " + cfg + " --out " + a.string(), work).code == 0);
            REQUIRE(run_cli("--config " + cfg + " --out " + b.string(), work).code == 0);

            const auto report = nlohmann::json::parse(slurp(a / "run_report.json"));
            std::vector<std::string> listed;
            for (const auto& f : report["outputs"]) {
                listed.push_back(f.get<std::string>());
                CHECK(fs::exists(a / f.get<std::string>()));
            }
            for (const auto& e : fs::directory_iterator(a)) {
                const auto fname = e.path().filename().string();
                if (fname != "run_report.json")
                    CHECK(std::find(listed.begin(), listed.end(), fname) != listed.end());
            }

            const auto csv = csv_files(a);
            CHECK(csv == csv_files(b));
            for (const auto& f : csv) {
                INFO(f);
                CHECK(slurp(a / f) == slurp(b / f));
                check_finite_cells(a / f);
            }

            // Deleting a listed file and rerunning restores it unchanged.
            if (!listed.empty()) {
                const auto victim = a / listed.front();
                const auto before = slurp(victim);
                fs::remove(victim);
                REQUIRE(run_cli("--config " + cfg + " --out " + a.string(), work).code == 0);
                REQUIRE(fs::exists(victim));
                if (victim.extension() == ".csv") CHECK(slurp(victim) == before);
            }
        }
    }
}

TEST_CASE("output directory and seed precedence", "[cli]") {
    const auto work = scratch("precedence");
    const auto cfg = (config_dir / "abm_regular.json").string();
    SECTION("environment fallback") {
        const auto env_dir = work / "from_env";
        REQUIRE(run_cli("--config " + cfg, work, "SODEXO_OUT=\"" + env_dir.string() + "\"").code == 0);
        CHECK(fs::exists(env_dir / "run_report.json"));
        const auto flag_dir = work / "from_flag";
        REQUIRE(run_cli("--config " + cfg + " --out " + flag_dir.string(), work,
                        "SODEXO_OUT=\"" + env_dir.string() + "_unused\"")
                    .code == 0);
        CHECK(fs::exists(flag_dir / "run_report.json"));
        CHECK_FALSE(fs::exists(env_dir.string() + "_unused"));
    }
    SECTION("seed override changes stochastic output") {
        const auto a = work / "s1", b = work / "s2";
        REQUIRE(run_cli("--config " + cfg + " --out " + a.string() + " --seed 1", work).code == 0);
        REQUIRE(run_cli("--config " + cfg + " --out " + b.string() + " --seed 2", work).code == 0);
        CHECK(slurp(a / "abm_ensemble.csv") != slurp(b / "abm_ensemble.csv"));
        const auto report = nlohmann::json::parse(slurp(a / "run_report.json"));
        CHECK(report["seed"] == 1);
    }
}

TEST_CASE("CSV schemas", "[cli]") {
    const auto work = scratch("schema");
    REQUIRE(run_cli("--config " + (config_dir / "ode_sweep.json").string() + " --out " + (work / "ode").string(), work).code == 0);
    REQUIRE(run_cli("--config " + (config_dir / "deploy.json").string() + " --out " + (work / "dep").string(), work).code == 0);
    auto header = [](const fs::path& p) {
        std::ifstream in(p);
        std::string h;
        std::getline(in, h);
        return h;
    };
    for (int z : {0, 5, 10, 25}) CHECK(header(work / "ode" / ("ode_z" + std::to_string(z) + ".csv")) == "t,x1,x2");
    CHECK(header(work / "dep" / "deploy_sweep.csv") == "tau,p,z_star,utility");
    const auto plan = nlohmann::json::parse(slurp(work / "dep" / "deployment_plan.json"));
    CHECK(plan.contains("closed_form"));
    CHECK(plan.contains("combined"));
}

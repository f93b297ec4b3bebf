#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "levyruin/cli.hpp"
#include "levyruin/decompose.hpp"

using namespace levyruin;
namespace fs = std::filesystem;

namespace {

fs::path scratch(const std::string& name) {
    const fs::path p = fs::temp_directory_path() / ("levyruin_cli_test_" + name);
    fs::remove_all(p);
    fs::create_directories(p);
    return p;
}

std::string slurp(const fs::path& p) {
    std::ifstream f(p, std::ios::binary);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

const char* kExpo = R"(version: 1
command: ruin
model:
  drift: 4
  copula: {type: independence}
  margins:
    - {type: expo, lambda: 1, rate: 1}
    - {type: expo, lambda: 1, rate: 1}
barriers: {from: 0, to: 5, step: 0.5}
)";

int run_text(const std::string& yaml, const fs::path& dir, std::vector<std::string> sets, std::string* log = nullptr,
             unsigned threads = 1) {
    const fs::path cfg = dir / "in.yaml";
    std::ofstream(cfg) << yaml;
    cli::Options o;
    o.config_path = cfg.string();
    o.overrides = std::move(sets);
    o.out_dir = (dir / "out").string();
    o.threads = threads;
    std::ostringstream os;
    const int rc = cli::run(o, os);
    if (log) *log = os.str();
    return rc;
}

std::vector<std::vector<std::string>> read_csv(const fs::path& p) {
    std::vector<std::vector<std::string>> rows;
    std::ifstream f(p);
    for (std::string line; std::getline(f, line);) {
        std::vector<std::string> r;
        std::stringstream ss(line);
        for (std::string c; std::getline(ss, c, ',');) r.push_back(c);
        rows.push_back(r);
    }
    return rows;
}

}  // namespace

TEST_CASE("formatting and hashing") {
    CHECK(cli::format_double(0.1) == "0.10000000000000001");
    CHECK(std::stod(cli::format_double(1.0 / 3.0)) == 1.0 / 3.0);
    CHECK(cli::format_double(kInf) == "inf");
    CHECK(cli::fnv1a("") == 0xcbf29ce484222325ULL);
    CHECK(cli::fnv1a("a") == 0xaf63dc4c8601ec8cULL);
}

TEST_CASE("overrides") {
    YAML::Node n = YAML::Load(kExpo);
    cli::apply_override(n, "model.drift=3");
    cli::apply_override(n, "model.margins.1.rate=2");
    cli::apply_override(n, "simulation.seed=5");
    CHECK(n["model"]["drift"].as<double>() == 3.0);
    CHECK(n["model"]["margins"][1]["rate"].as<double>() == 2.0);
    CHECK(n["model"]["margins"][0]["rate"].as<double>() == 1.0);
    CHECK(n["simulation"]["seed"].as<int>() == 5);
    CHECK_THROWS_AS(cli::apply_override(n, "model.margins.7.rate=2"), cli::SchemaError);
    CHECK_THROWS_AS(cli::apply_override(n, "novalue"), cli::SchemaError);
    YAML::Node a = YAML::Load(kExpo), b = YAML::Load(kExpo);
    cli::apply_override(b, "output.dir=elsewhere");
    CHECK(cli::canonical_config(a) == cli::canonical_config(b));
}

TEST_CASE("ruin command") {
    const fs::path d = scratch("ruin");
    REQUIRE(run_text(kExpo, d, {}) == 0);
    const auto rows = read_csv(d / "out" / "ruin.csv");
    REQUIRE(rows.size() == 12);
    CHECK(rows[0] == std::vector<std::string>{"x", "ruin_prob", "error"});
    CHECK(std::stod(rows[1][1]) == 0.5);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double x = std::stod(rows[i][0]);
        CHECK(std::abs(std::stod(rows[i][1]) - 0.5 * std::exp(-0.5 * x)) < 1e-4);
    }
    const std::string manifest = slurp(d / "out" / "manifest.json");
    CHECK(manifest.find("\"ruin.csv\"") != std::string::npos);
    CHECK(manifest.find("config_hash") != std::string::npos);
    // the written config reproduces the outputs byte for byte
    const std::string first = slurp(d / "out" / "ruin.csv");
    cli::Options o;
    o.config_path = (d / "out" / "config.yaml").string();
    o.out_dir = (d / "again").string();
    std::ostringstream log;
    REQUIRE(cli::run(o, log) == 0);
    CHECK(slurp(d / "again" / "ruin.csv") == first);
    CHECK(slurp(d / "again" / "manifest.json") == manifest);
}

TEST_CASE("decompose command matches the Clayton closed form") {
    const fs::path d = scratch("decompose");
    REQUIRE(run_text(kExpo, d, {"command=decompose", "model.copula={type: clayton, theta: 1}"}) == 0);
    const auto rows = read_csv(d / "out" / "decompose.csv");
    REQUIRE(rows.size() == 7);
    CHECK(rows[0][7] == "tail_sum");
    JumpDecomposition dec(LevyCopula::clayton(1), MarginalTail::expo(1, 1), MarginalTail::expo(1, 1));
    const auto active = dec.active_closed_forms();
    const ClosedForm* total = nullptr;
    for (const auto& cf : closed_form_catalog())
        if (cf.component == 0 && std::find(active.begin(), active.end(), cf.name) != active.end()) total = &cf;
    REQUIRE(total != nullptr);
    for (std::size_t i = 1; i < rows.size(); ++i) {
        const double z = std::stod(rows[i][0]);
        CHECK(std::stod(rows[i][7]) == doctest::Approx(total->eval(dec, z)).epsilon(1e-9));
        CHECK(std::stod(rows[i][8]) >= 0.0);
    }
}

TEST_CASE("schema and validation failures") {
    const fs::path d = scratch("schema");
    std::string log;
    CHECK(run_text(std::string(kExpo) + "colour: blue\n", d, {}, &log) == 2);
    CHECK(log.find(":10: unknown key 'colour'") != std::string::npos);
    std::string bad = kExpo;
    bad.replace(bad.find("rate: 1}"), 8, "rate: 1, shape: 2}");
    CHECK(run_text(bad, d, {}, &log) == 2);
    CHECK(log.find(":7: unknown key 'shape' in model.margins[0]") != std::string::npos);
    CHECK(run_text(kExpo, d, {"model.drift=fast"}, &log) == 2);
    CHECK(log.find("model.drift must be a number") != std::string::npos);
    CHECK(run_text(kExpo, d, {"version=2"}, &log) == 2);
    CHECK(run_text(kExpo, d, {"command=validate", "model.drift=1.5"}, &log) == 2);
    CHECK(log.find("net profit condition") != std::string::npos);
    CHECK(run_text(kExpo, d, {"command=validate"}, &log) == 0);
    CHECK(run_text(kExpo, d, {"barriers=[0, 50]"}, &log) == 2);
    CHECK(run_text(kExpo, d, {"command=triple"}, &log) == 2);
}

TEST_CASE("simulate output is independent of the worker count") {
    const fs::path a = scratch("sim_a"), b = scratch("sim_b");
    const std::vector<std::string> sets{"command=simulate", "model.copula={type: clayton, theta: 2}",
                                        "barriers=[0, 1.5]", "simulation={seed: 11, n_paths: 2000}"};
    REQUIRE(run_text(kExpo, a, sets, nullptr, 1) == 0);
    REQUIRE(run_text(kExpo, b, sets, nullptr, 3) == 0);
    for (const char* f : {"records_0.csv", "records_1.csv", "simulate_summary.csv", "manifest.json"})
        CHECK(slurp(a / "out" / f) == slurp(b / "out" / f));
    const auto rows = read_csv(a / "out" / "records_0.csv");
    CHECK(rows[0] == std::vector<std::string>{"path", "tau", "g_prev", "u", "v", "y", "k", "censored"});
    CHECK(rows.size() == 2001);
}

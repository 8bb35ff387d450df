#include <doctest.h>

#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "scenario.hpp"

using namespace qfluct;
using namespace qfluct::cli;

namespace {

struct Run {
    int status;
    std::string out;
    std::string err;
};

Run run(std::vector<std::string> args) {
    args.insert(args.begin(), "qfluct");
    std::ostringstream out, err;
    const int status = run_cli(args, out, err);
    return {status, out.str(), err.str()};
}

std::filesystem::path scratch(const std::string& name) {
    auto dir = std::filesystem::temp_directory_path() / "qfluct_test_cli";
    std::filesystem::create_directories(dir);
    return dir / name;
}

std::string slurp(const std::filesystem::path& p) {
    std::ifstream in(p);
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

int run_binary(const std::string& args, const std::filesystem::path& out) {
    const std::string cmd = std::string(QFLUCT_BINARY) + " " + args + " > " + out.string() + " 2>/dev/null";
    const int raw = std::system(cmd.c_str());
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST_CASE("audit of a sharp rotation") {
    const auto r = run({"audit", "--state", "azimuthal:m=1", "--pair", "Lz,phi"});
    REQUIRE(r.status == ok);
    const auto doc = Json::parse(r.out);
    CHECK(doc["verdict"]["class"] == "TRIVIAL_ZERO");
    CHECK(std::abs(doc["verdict"]["gap_ab"]["im"].get<double>() - 1.0) < 1e-3);
    CHECK(std::abs(doc["verdict"]["gap_ab"]["re"].get<double>()) < 1e-3);
    CHECK(doc["grid"]["nodes"][0] == 2048);
    CHECK(doc["config"]["command"] == "audit");
}

TEST_CASE("energy-time audit needs no state") {
    const auto r = run({"audit", "--pair", "E,t", "--delta-e", "0.3"});
    REQUIRE(r.status == ok);
    const auto doc = Json::parse(r.out);
    CHECK(doc["verdict"]["class"] == "TRIVIAL_ZERO");
    CHECK(doc["verdict"]["gap_ab"]["im"] == -1.0);
}

TEST_CASE("annex command prints a passing CSV table") {
    const auto r = run({"annex", "--sigma", "1", "--gamma", "0.5", "--lambda", "0.5", "--k", "1"});
    REQUIRE(r.status == ok);
    std::istringstream lines(r.out);
    std::string line;
    std::getline(lines, line);
    CHECK(line == "run,label,oracle,numeric,error,status");
    int rows = 0;
    while (std::getline(lines, line)) {
        ++rows;
        CHECK(line.substr(line.rfind(',') + 1) == "PASS");
    }
    CHECK(rows >= 20);
    CHECK(r.out.find("delta_out:x") != std::string::npos);
}

TEST_CASE("spin commutators") {
    const auto r = run({"spins", "--n", "3"});
    REQUIRE(r.status == ok);
    const auto doc = Json::parse(r.out);
    CHECK(doc["commutator_residual"].get<double>() < 1e-12);
    CHECK(doc["dimension"] == 8);
    CHECK(doc["density_matrices"]["pass"] == true);
}

TEST_CASE("other commands run") {
    CHECK(run({"catalog", "--state", "qtp:N=1,I=1,omega=1"}).status == ok);
    CHECK(run({"detcheck", "--state", "qtp:N=2,I=1,omega=1"}).status == ok);
    CHECK(run({"channel", "--gamma", "0.3", "--lambda", "0.2"}).status == ok);
    const auto c = run({"classical", "--dist", "uniform", "--width", "0.05"});
    REQUIRE(c.status == ok);
    CHECK(std::abs(Json::parse(c.out)["indicators"]["eps_mean"].get<double>()) < 1e-6);
    const auto s = run({"sweep", "--kind", "boundary", "--cases", "5"});
    CHECK(s.status == ok);
    CHECK(s.out.rfind("case,", 0) == 0);
}

TEST_CASE("format selection") {
    const auto csv = run({"audit", "--state", "azimuthal:m=1", "--format", "csv"});
    REQUIRE(csv.status == ok);
    CHECK(csv.out.rfind("key,value\n", 0) == 0);
    CHECK(csv.out.find("verdict.class,TRIVIAL_ZERO") != std::string::npos);
    const auto json = run({"sweep", "--kind", "boundary", "--cases", "3", "--format", "json"});
    REQUIRE(json.status == ok);
    CHECK(Json::parse(json.out)["rows"].size() == 3);
}

TEST_CASE("exit statuses") {
    CHECK(run({"audit", "--state", "bogus:m=1"}).status == parse_failure);
    CHECK(run({"audit", "--state", "azimuthal:m=1", "--frobnicate"}).status == parse_failure);
    CHECK(run({"audit", "--state", "azimuthal:m=1", "--pair", "Lz"}).status == parse_failure);
    CHECK(run({}).status == parse_failure);
    CHECK(run({"sweep", "--kind", "nope"}).status == parse_failure);
    CHECK(run({"audit", "--state", "azimuthal:m=1", "--format", "xml"}).status == parse_failure);
    CHECK(run({"channel", "--sigma", "1", "--lambda", "2"}).status == validity_failure);
    CHECK(run({"audit", "--state", "box2d:a=2,b=1", "--pair", "px,py"}).status == validity_failure);
    CHECK(run({"audit", "--state", "azimuthal:m=1", "--pair", "x,p"}).status == validity_failure);
    CHECK(run({"audit", "--state", "azimuthal:m=1", "--out", "/nonexistent-dir/x.json"}).status == io_failure);
    CHECK(run({"audit", "--config", "/nonexistent-dir/c.json"}).status == io_failure);
    const auto strict = run({"annex", "--sigma", "1", "--gamma", "0.5", "--lambda", "0.5", "--k", "1", "--tol", "1e-14"});
    CHECK(strict.status == tolerance_failure);
    CHECK(strict.out.find("FAIL") != std::string::npos);
    const auto help = run({"--help"});
    CHECK(help.status == ok);
    CHECK(help.out.find("audit") != std::string::npos);
}

TEST_CASE("identical configs give identical reports") {
    const std::vector<std::string> args{"sweep", "--kind", "entropy", "--cases", "4", "--seed", "12"};
    CHECK(run(args).out == run(args).out);
    const std::vector<std::string> audit{"audit", "--state", "qtp:N=2,I=1,omega=1", "--pair", "Lz,phi"};
    CHECK(run(audit).out == run(audit).out);
    CHECK(run({"sweep", "--kind", "entropy", "--cases", "4", "--seed", "13"}).out != run(args).out);
}

TEST_CASE("configs round-trip through their canonical form") {
    const auto c = parse_command_line({"qfluct", "channel", "--gamma", "0.25", "--k", "-2", "--nodes", "1024"});
    CHECK(c.command == "channel");
    CHECK(c.gamma == 0.25);
    CHECK(c.k == -2.0);
    const auto canonical = to_json(c);
    CHECK(canonical.begin().key() == "command");
    CHECK_FALSE(canonical.contains("kind"));
    const auto again = config_from_json(canonical);
    CHECK(to_json(again).dump() == canonical.dump());

    const auto defaults = parse_command_line({"qfluct", "audit"});
    CHECK(defaults.pair == "Lz,phi");
    CHECK(defaults.seed == 0);
    CHECK(to_json(config_from_json(to_json(defaults))).dump() == to_json(defaults).dump());
    CHECK_THROWS_AS(config_from_json(Json{{"nodes", 10}}), ParseError);
}

TEST_CASE("config files supply defaults and flags override them") {
    const auto path = scratch("config.json");
    {
        std::ofstream f(path);
        f << R"({"command": "audit", "state": "azimuthal:m=2", "pair": "Lz,phi", "nodes": 1024})";
    }
    const auto from_file = parse_command_line({"qfluct", "--config", path.string()});
    CHECK(from_file.command == "audit");
    CHECK(from_file.state == "azimuthal:m=2");
    CHECK(from_file.nodes == 1024);
    const auto overridden = parse_command_line({"qfluct", "audit", "--config", path.string(), "--nodes", "512"});
    CHECK(overridden.nodes == 512);
    CHECK(overridden.state == "azimuthal:m=2");

    const auto r = run({"--config", path.string()});
    REQUIRE(r.status == ok);
    CHECK(Json::parse(r.out)["grid"]["nodes"][0] == 1024);

    {
        std::ofstream f(path);
        f << "{not json";
    }
    CHECK(run({"--config", path.string()}).status == parse_failure);
    {
        std::ofstream f(path);
        f << R"({"command": "audit", "nonsense": 1})";
    }
    CHECK(run({"--config", path.string()}).status == parse_failure);
}

TEST_CASE("reports can be written to a file") {
    const auto path = scratch("report.json");
    std::filesystem::remove(path);
    const auto r = run({"audit", "--state", "azimuthal:m=3", "--out", path.string()});
    REQUIRE(r.status == ok);
    CHECK(r.out.empty());
    CHECK(Json::parse(slurp(path))["verdict"]["class"] == "TRIVIAL_ZERO");
}

TEST_CASE("the installed binary maps failures to exit statuses") {
    const auto out = scratch("binary.out");
    CHECK(run_binary("audit --state azimuthal:m=1 --pair Lz,phi", out) == 0);
    CHECK(Json::parse(slurp(out))["verdict"]["class"] == "TRIVIAL_ZERO");
    const std::string first = slurp(out);
    CHECK(run_binary("audit --state azimuthal:m=1 --pair Lz,phi", out) == 0);
    CHECK(slurp(out) == first);
    CHECK(run_binary("audit --state nope", out) == 2);
    CHECK(run_binary("channel --lambda 5", out) == 3);
    CHECK(run_binary("annex --tol 1e-14", out) == 1);
    CHECK(run_binary("audit --state azimuthal:m=1 --out /nonexistent-dir/r.json", out) == 4);
}

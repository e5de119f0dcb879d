#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <iterator>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "biharm/cli.hpp"
#include "biharm/config.hpp"

using namespace biharm;
namespace fs = std::filesystem;

namespace {

fs::path fresh_dir(const std::string& name) {
    const fs::path dir = fs::temp_directory_path() / ("biharm_test_cli_" + name);
    fs::remove_all(dir);
    return dir;
}

int run_args(std::vector<std::string> args) {
    args.insert(args.begin(), "biharm");
    std::vector<const char*> argv;
    for (const auto& a : args) argv.push_back(a.c_str());
    return run(static_cast<int>(argv.size()), argv.data());
}

nlohmann::json read_json(const fs::path& p) {
    std::ifstream in(p);
    return nlohmann::json::parse(in);
}

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

std::vector<std::string> lines(const fs::path& p) {
    std::ifstream in(p);
    std::vector<std::string> out;
    for (std::string s; std::getline(in, s);) out.push_back(s);
    return out;
}

} // namespace

TEST_CASE("classify example") {
    const auto dir = fresh_dir("classify");
    CHECK(run_args({"classify", "--alpha", "6", "--gamma", "4", "--m", "0", "--p", "2", "--out", dir.string()}) == 0);
    const auto j = read_json(dir / "report.json");
    CHECK(j["regime"] == "NONEXISTENCE");
    CHECK(j["p_star"] == "3");
    CHECK(j["status"] == "ok");
    CHECK(j["config"]["alpha"] == "6");
    CHECK(j["config"]["command"] == "classify");
    CHECK_FALSE(j["config"].contains("out"));
    CHECK_FALSE(j["disclaimers"].empty());
    CHECK(fs::exists(dir / "run.cfg"));
}

TEST_CASE("kernel table example") {
    const auto dir = fresh_dir("kernel");
    CHECK(run_args({"kernel-table", "--alpha", "6", "--gamma", "4", "--n", "6", "--rho-min", "1", "--rho-max", "1e4",
                    "--out", dir.string()}) == 0);
    const auto rows = lines(dir / "kernel_table.csv");
    REQUIRE(rows.size() > 2);
    CHECK(rows[0].find(',') != std::string::npos);
    std::stringstream first(rows[1]);
    std::string rho, value;
    std::getline(first, rho, ',');
    std::getline(first, value, ',');
    CHECK(std::stod(rho) == 1.0);
    CHECK(std::stod(value) == doctest::Approx(1.0 / 6.0).epsilon(1e-9));
    // scientific notation with at least 12 significant digits
    CHECK(value.find('e') != std::string::npos);
    CHECK(value.find('.') != std::string::npos);
    CHECK(value.substr(value.find('.') + 1, value.find('e') - value.find('.') - 1).size() >= 11);
}

TEST_CASE("solve example") {
    const auto dir = fresh_dir("solve");
    CHECK(run_args({"solve", "--alpha", "6", "--gamma", "4", "--s", "0", "--p", "4", "--out", dir.string()}) == 0);
    const auto j = read_json(dir / "report.json");
    CHECK(j["membership_margin"].get<double>() > 0.0);
    CHECK(j["iterations"].get<int>() <= j["iteration_bound"].get<int>());
    CHECK(j["lipschitz_measured"].get<double>() < 1.0);
    const auto rows = lines(dir / "solution.csv");
    CHECK(rows[0] == "rho,u,h");
    CHECK(rows.size() == 1025);
}

TEST_CASE("remaining commands write their artifacts") {
    struct Case {
        std::vector<std::string> args;
        std::string csv;
    };
    const std::vector<Case> cases{
        {{"verify-bounds", "--alpha", "6", "--gamma", "4", "--s", "0", "--p", "4", "--rho-min", "1e-2", "--rho-max", "1e3",
          "--nodes", "200"}, "prop1.csv"},
        {{"eigen", "--alpha", "6", "--gamma", "4", "--mesh", "128"}, "eigen.csv"},
        {{"witness", "--alpha", "6", "--gamma", "4", "--m", "0", "--p", "2", "--mesh", "128"}, "witness.csv"},
        {{"oracle", "--samples", "20000"}, "oracle.csv"},
    };
    for (const auto& c : cases) {
        const auto dir = fresh_dir(c.args[0]);
        auto args = c.args;
        args.push_back("--out");
        args.push_back(dir.string());
        INFO(c.args[0]);
        CHECK(run_args(args) == 0);
        CHECK(fs::exists(dir / c.csv));
        CHECK(read_json(dir / "report.json")["command"] == c.args[0]);
    }
}

TEST_CASE("witness verdict in the report") {
    const auto dir = fresh_dir("witness_p2");
    REQUIRE(run_args({"witness", "--alpha", "6", "--gamma", "4", "--m", "0", "--p", "2", "--mesh", "128", "--out",
                      dir.string()}) == 0);
    CHECK(read_json(dir / "report.json")["verdict"] == "CONTRADICTION");
}

TEST_CASE("exit codes") {
    const auto dir = fresh_dir("codes");
    const std::string out = dir.string();
    CHECK(run_args({"classify", "--alpha", "6", "--gamma", "4", "--bogus", "1", "--out", out}) == 1);
    CHECK(run_args({"no-such-command"}) == 1);
    CHECK(run_args({}) == 1);
    CHECK(run_args({"classify", "--alpha", "6", "--gamma", "4", "--p", "1", "--out", out}) == 2);
    CHECK(run_args({"classify", "--alpha", "abc", "--gamma", "4", "--out", out}) == 2);
    CHECK(run_args({"kernel-table", "--alpha", "6", "--gamma", "3", "--out", out}) == 2);
    CHECK(run_args({"solve", "--alpha", "6", "--gamma", "4", "--s", "0", "--p", "2", "--out", out}) == 2);
    CHECK(run_args({"solve", "--alpha", "6", "--gamma", "4", "--s", "0", "--p", "4", "--nodes", "256", "--tol", "1e-30",
                    "--maxit", "2", "--out", out}) == 3);
}

TEST_CASE("run config round trip") {
    for (const auto& cmd : command_names()) {
        RunConfig rc{cmd, command_defaults(cmd)};
        rc.values["alpha"] = "13/2";
        const auto kv = rc.to_key_values();
        CHECK(kv.at("command") == cmd);
        const auto back = RunConfig::from_key_values(kv);
        CHECK(back.command == rc.command);
        CHECK(back.values == rc.values);
        std::stringstream ss;
        write_key_values(ss, kv);
        CHECK(parse_key_values(ss) == kv);
    }
    CHECK(command_names().size() == 7);
}

TEST_CASE("config file is read and flags override it") {
    const auto dir = fresh_dir("config");
    fs::create_directories(dir);
    {
        std::ofstream cfg(dir / "in.cfg");
        cfg << "# classify example\ncommand=classify\nalpha=6\ngamma=4\nm=0\np=5\n";
    }
    const auto out1 = dir / "a", out2 = dir / "b";
    CHECK(run_args({"classify", "--config", (dir / "in.cfg").string(), "--out", out1.string()}) == 0);
    CHECK(read_json(out1 / "report.json")["regime"] != "NONEXISTENCE");
    CHECK(run_args({"classify", "--config", (dir / "in.cfg").string(), "--p", "2", "--out", out2.string()}) == 0);
    CHECK(read_json(out2 / "report.json")["regime"] == "NONEXISTENCE");
    // the written run.cfg reproduces the run
    const auto out3 = dir / "c";
    CHECK(run_args({"classify", "--config", (out2 / "run.cfg").string(), "--out", out3.string()}) == 0);
    CHECK(slurp(out2 / "report.json") == slurp(out3 / "report.json"));
    {
        std::ofstream bad(dir / "bad.cfg");
        bad << "command=classify\nalpha=6\ngamma=4\nwibble=1\n";
    }
    CHECK(run_args({"classify", "--config", (dir / "bad.cfg").string(), "--out", out1.string()}) == 1);
    CHECK(run_args({"solve", "--config", (dir / "in.cfg").string(), "--out", out1.string()}) == 1);
}

TEST_CASE("repeated runs are byte identical") {
    const std::vector<std::vector<std::string>> runs{
        {"solve", "--alpha", "6", "--gamma", "4", "--s", "0", "--p", "4", "--nodes", "512"},
        {"oracle", "--samples", "20000", "--seed", "9"},
        {"witness", "--alpha", "6", "--gamma", "4", "--m", "0", "--p", "3", "--mesh", "128"},
    };
    for (const auto& r : runs) {
        const auto d1 = fresh_dir(r[0] + "_1"), d2 = fresh_dir(r[0] + "_2");
        auto a1 = r, a2 = r;
        a1.insert(a1.end(), {"--out", d1.string()});
        a2.insert(a2.end(), {"--out", d2.string()});
        REQUIRE(run_args(a1) == 0);
        REQUIRE(run_args(a2) == 0);
        for (const auto& entry : fs::directory_iterator(d1)) {
            INFO(entry.path().string());
            CHECK(slurp(entry.path()) == slurp(d2 / entry.path().filename()));
        }
    }
}

#ifdef BIHARM_CLI_PATH
TEST_CASE("the executable reports usage errors") {
    const auto dir = fresh_dir("exe");
    const std::string cmd = std::string(BIHARM_CLI_PATH) + " classify --bogus > /dev/null 2>&1";
    const int status = std::system(cmd.c_str());
    CHECK(WEXITSTATUS(status) == 1);
    const std::string ok = std::string(BIHARM_CLI_PATH) + " classify --alpha 6 --gamma 4 --p 2 --out " + dir.string() +
                           " > /dev/null 2>&1";
    CHECK(WEXITSTATUS(std::system(ok.c_str())) == 0);
    CHECK(fs::exists(dir / "report.json"));
}
#endif

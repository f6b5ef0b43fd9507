#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "pparab/cli.hpp"
#include "pparab/errors.hpp"

using namespace pparab;
using namespace pparab::cli;
using doctest::Approx;
namespace fs = std::filesystem;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "pparab");
    std::vector<const char*> argv;
    for (const auto& a : args)
        argv.push_back(a.c_str());
    std::ostringstream out, err;
    const int code = main_entry(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

fs::path scratch(const std::string& name)
{
    const fs::path dir = fs::temp_directory_path() / "pparab_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

std::string slurp(const fs::path& p)
{
    std::ifstream is(p, std::ios::binary);
    std::ostringstream s;
    s << is.rdbuf();
    return s.str();
}

void write_file(const fs::path& p, const std::string& text)
{
    std::ofstream os(p);
    os << text;
}

} // namespace

TEST_CASE("parse fills defaults")
{
    const auto c = parse({"cert", "-p", "3", "-g", "0"});
    CHECK(c.name == "cert");
    CHECK(c.params.p == 3.0);
    CHECK(c.params.gamma == 0.0);
    CHECK(c.params.n == 2);
    CHECK_FALSE(c.s_given);
    CHECK(c.samples == 100000);
    CHECK(c.eta == 0.05);

    CHECK_THROWS_AS(parse({}), UsageError);
    CHECK_THROWS_AS(parse({"bogus"}), UsageError);
    CHECK_THROWS_AS(parse({"cert", "-p"}), UsageError);
    CHECK_THROWS_AS(parse({"cert", "-p", "abc"}), UsageError);
    CHECK_THROWS_AS(parse({"cert", "--nx", "1"}), UsageError);
    CHECK_THROWS_AS(parse({"solve"}), UsageError);
    CHECK_NOTHROW(parse({"solve", "--nx", "9"}));
}

TEST_CASE("config precedence")
{
    const auto cfg = scratch("prec.json");
    write_file(cfg, R"({"p": 4.0, "gamma": 0.2, "s": -1.5, "eta": 0.01, "grid": {"nx": 17}})");
    const auto a = parse({"solve", "--config", cfg.string()});
    CHECK(a.params.p == 4.0);
    CHECK(a.params.gamma == 0.2);
    CHECK(a.s_given);
    CHECK(a.params.s == -1.5);
    CHECK(a.eta == 0.01);
    REQUIRE(a.nx);
    CHECK(*a.nx == 17);

    const auto b = parse({"solve", "--config", cfg.string(), "-p", "2.5", "--nx", "9"});
    CHECK(b.params.p == 2.5);
    CHECK(b.params.gamma == 0.2);
    CHECK(*b.nx == 9);

    CHECK_THROWS_AS(parse({"cert", "--config", scratch("missing.json").string()}), IoError);
    write_file(scratch("broken.json"), "{ not json");
    CHECK_THROWS_AS(parse({"cert", "--config", scratch("broken.json").string()}), IoError);
}

TEST_CASE("exit codes")
{
    const auto ok = invoke({"cert", "-p", "3", "-g", "0"});
    CHECK(ok.code == kExitOk);
    const auto j = nlohmann::json::parse(ok.out);
    CHECK(j["min_c3c4"].get<double>() == Approx(1.75).epsilon(1e-9));
    CHECK(j["ok"].get<bool>());

    const auto bad = invoke({"cert", "-p", "3", "-g", "0.95"});
    CHECK(bad.code == kExitDomain);
    CHECK_FALSE(nlohmann::json::parse(bad.out)["ok"].get<bool>());
    CHECK(nlohmann::json::parse(bad.out).contains("case_i_admissible"));

    const auto usage = invoke({"solve"});
    CHECK(usage.code == kExitUsage);
    CHECK(usage.err.find("--nx") != std::string::npos);
    CHECK(usage.err.find('\n') == usage.err.size() - 1);

    CHECK(invoke({"cert", "--config", scratch("missing.json").string()}).code == kExitIo);
    CHECK(invoke({"cert", "-p", "0.5"}).code == kExitDomain);
    CHECK(invoke({"solve", "--nx", "9", "--out", "/proc/forbidden/dir"}).code == kExitIo);

    const auto help = invoke({"cert", "--help"});
    CHECK(help.code == kExitOk);
    CHECK(help.out.find("--config") != std::string::npos);
}

TEST_CASE("fundamental check and counterexample")
{
    const auto r = invoke({"fundamental-check", "--samples", "20000", "--seed", "7"});
    CHECK(r.code == kExitOk);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j.dump().find("worst") != std::string::npos);

    const auto c = invoke({"counterexample", "-p", "3", "-g", "0.5", "--samples", "1000"});
    CHECK(c.code == kExitOk);
    CHECK(nlohmann::json::parse(c.out)["max_residual"].get<double>() <= 1e-12);
}

TEST_CASE("same seed gives identical artifacts")
{
    const auto a = scratch("fc_a.json"), b = scratch("fc_b.json"), c = scratch("fc_c.json");
    REQUIRE(invoke({"fundamental-check", "--samples", "5000", "--seed", "11", "--out", a.string()}).code == 0);
    REQUIRE(invoke({"fundamental-check", "--samples", "5000", "--seed", "11", "--out", b.string()}).code == 0);
    REQUIRE(invoke({"fundamental-check", "--samples", "5000", "--seed", "12", "--out", c.string()}).code == 0);
    CHECK(slurp(a) == slurp(b));
    CHECK(slurp(a) != slurp(c));

    const auto d1 = scratch("sv1"), d2 = scratch("sv2");
    fs::remove_all(d1);
    fs::remove_all(d2);
    REQUIRE(invoke({"solve", "--nx", "17", "-p", "3", "-g", "0.5", "--out", d1.string()}).code == 0);
    REQUIRE(invoke({"solve", "--nx", "17", "-p", "3", "-g", "0.5", "--out", d2.string()}).code == 0);
    CHECK(fs::exists(d1 / "slice_000.csv"));
    CHECK(fs::exists(d1 / "slice_010.csv"));
    CHECK(slurp(d1 / "slice_010.csv") == slurp(d2 / "slice_010.csv"));
}

TEST_CASE("region map from config")
{
    const auto cfg = scratch("regions.json");
    write_file(cfg, R"({"p_grid": [1.5, 3.0, 6.0], "gamma_grid": [0.0, 0.5, 0.95]})");
    const auto out = scratch("map.csv");
    const auto cmd = parse({"region-map", "--config", cfg.string(), "--out", out.string()});
    CHECK(cmd.name == "region-map");
    CHECK(cmd.out == out.string());
    std::ostringstream o, e;
    CHECK(run(cmd, o, e) == kExitOk);
    std::ifstream is(out);
    std::string line;
    int rows = 0;
    std::getline(is, line);
    CHECK(line.find("p") == 0);
    while (std::getline(is, line))
        if (!line.empty())
            ++rows;
    CHECK(rows == 9);
}

TEST_CASE("verify-estimate, divstruct and threshold run end to end")
{
    const auto csv = scratch("verify.csv");
    const auto v = invoke({"verify-estimate", "--nx", "33", "-p", "3", "-g", "0.5", "--out", csv.string()});
    CHECK(v.code == kExitOk);
    const auto j = nlohmann::json::parse(v.out);
    CHECK(j["key_inequality"]["violation_fraction"].get<double>() == 0.0);
    CHECK(slurp(csv).rfind("p,gamma,s,epsilon,nx,r,", 0) == 0);

    CHECK(invoke({"divstruct-test"}).code == kExitOk);

    const auto t = invoke({"threshold-scan", "-p", "3", "-g", "0"});
    CHECK(t.code == kExitOk);
    CHECK(t.out.rfind("s,exponent,integrable,numeric_integrable", 0) == 0);
}

TEST_CASE("installed binary maps exit codes")
{
    const char* bin = std::getenv("PPARAB_BIN");
    if (!bin) {
        MESSAGE("PPARAB_BIN not set; skipping");
        return;
    }
    const std::string b = bin;
    auto sh = [](const std::string& cmd) {
        const int st = std::system((cmd + " >/dev/null 2>&1").c_str());
        return WEXITSTATUS(st);
    };
    CHECK(sh(b + " cert -p 3 -g 0") == 0);
    CHECK(sh(b + " cert -p 3 -g 0.95") == 1);
    CHECK(sh(b + " solve") == 2);
    CHECK(sh(b + " cert --config /nonexistent/cfg.json") == 3);
}

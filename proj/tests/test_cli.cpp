#include "belltest/cli.hpp"

#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace fs = std::filesystem;
using belltest::cli::run;

namespace {

struct Result {
    int code;
    std::string out;
    std::string err;
};

Result invoke(std::vector<std::string> args)
{
    args.insert(args.begin(), "belltest");
    std::vector<const char*> argv;
    for (const auto& a : args) {
        argv.push_back(a.c_str());
    }
    std::ostringstream out, err;
    const int code = run(static_cast<int>(argv.size()), argv.data(), out, err);
    return {code, out.str(), err.str()};
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

// Set BELLTEST_UPDATE_GOLDEN=1 to rewrite the files after an intended change.
void check_golden(const std::string& name, const std::string& actual)
{
    const fs::path path = fs::path(BELLTEST_GOLDEN_DIR) / name;
    if (const char* u = std::getenv("BELLTEST_UPDATE_GOLDEN"); u && std::string(u) == "1") {
        std::ofstream(path, std::ios::binary) << actual;
    }
    REQUIRE_MESSAGE(fs::exists(path), "missing golden file " << path);
    CHECK_MESSAGE(slurp(path) == actual, "golden mismatch: " << name);
}

fs::path scratch(const std::string& name)
{
    const auto dir = fs::temp_directory_path() / "belltest_cli_test";
    fs::create_directories(dir);
    return dir / name;
}

}  // namespace

TEST_CASE("verify-theorem")
{
    const auto r = invoke({"verify-theorem"});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"min_functional_value\": -1") != std::string::npos);
    CHECK(r.out.find("\"case\": \"iii\"") != std::string::npos);
    CHECK(invoke({"verify-theorem", "--workers", "5"}).out == r.out);
    check_golden("verify_theorem.json", r.out);
}

TEST_CASE("eval")
{
    const auto a31 = invoke({"eval", "--ineq", "ardehali31", "--source", "qm-real", "--eta", "0.2",
                             "--phi", "30", "--force-F", "1"});
    CHECK(a31.code == 0);
    check_golden("eval_ardehali31_F1.json", a31.out);

    const auto b65 = invoke({"eval", "--ineq", "bell65", "--source", "qm-ideal", "--diffs", "120,120,120"});
    CHECK(b65.code == 0);
    check_golden("eval_bell65.json", b65.out);

    const auto c = invoke({"eval", "--ineq", "chsh", "--source", "qm-ideal", "--angles",
                           "0,22.5,45,67.5", "--format", "csv"});
    CHECK(c.code == 0);
    CHECK(c.out.find("1.414213562373095") != std::string::npos);
    check_golden("eval_chsh.csv", c.out);

    const auto real = invoke({"eval", "--ineq", "ardehali28", "--source", "qm-real"});
    CHECK(real.code == 0);
    check_golden("eval_ardehali28_default.json", real.out);
}

TEST_CASE("eval with a model file")
{
    const auto model = scratch("uniform.model");
    {
        std::ofstream f(model);
        const char s[] = {'+', '0', '-'};
        for (char x : s)
            for (char y : s)
                for (char z : s)
                    for (char w : s)
                        f << x << y << z << w << " 0.012345679012345679\n";
    }
    const auto r = invoke({"eval", "--ineq", "ardehali10", "--source", "lhv", "--model", model.string(),
                           "--format", "csv"});
    CHECK(r.code == 0);
    CHECK(r.out.find(",false\n") != std::string::npos);

    const auto missing = invoke({"eval", "--source", "lhv"});
    CHECK(missing.code == 1);
    CHECK(missing.err.find("--model") != std::string::npos);
}

TEST_CASE("eval input errors")
{
    struct Case {
        std::vector<std::string> args;
        std::string flag;
    };
    const std::vector<Case> cases{
        {{"eval", "--ineq", "nope"}, "--ineq"},
        {{"eval", "--source", "qm-real", "--eta", "0"}, "--eta"},
        {{"eval", "--source", "qm-real", "--phi", "95"}, "--phi"},
        {{"eval", "--source", "qm-real", "--force-F", "1.5"}, "--force-F"},
        {{"eval", "--diffs", "90,90,90"}, "--diffs"},
        {{"eval", "--diffs", "120,x,120"}, "--diffs"},
        {{"eval", "--angles", "1,2,3"}, "--angles"},
        {{"eval", "--angles", "0,1,2,3", "--diffs", "120,120,120"}, "--angles"},
        {{"eval", "--format", "xml"}, "--format"},
        {{"eval", "--source", "elsewhere"}, "--source"},
    };
    for (const auto& c : cases) {
        const auto r = invoke(c.args);
        CHECK(r.code == 1);
        CHECK(r.out.empty());
        CHECK_MESSAGE(r.err.find("\"flag\":\"" + c.flag + "\"") != std::string::npos, r.err);
    }
    CHECK(invoke({"eval", "--bogus"}).code == 1);
    CHECK(invoke({}).code == 1);
}

TEST_CASE("mc")
{
    const auto counters = scratch("counters.csv");
    const auto manifest = scratch("manifest.txt");
    const std::vector<std::string> args{"mc", "--pairs", "200000", "--seed", "42", "--force-F", "1",
                                        "--counters", counters.string(), "--manifest",
                                        manifest.string()};
    const auto r = invoke(args);
    CHECK(r.code == 0);
    CHECK(r.out.find("\"sigma_distance\"") != std::string::npos);
    CHECK(r.out.find("\"analytic_lhs\": -1.49999999999999") != std::string::npos);
    check_golden("mc_seed42.json", r.out);
    check_golden("mc_seed42_counters.csv", slurp(counters));
    check_golden("mc_seed42_manifest.txt", slurp(manifest));

    auto threaded = args;
    threaded.insert(threaded.end(), {"--workers", "8"});
    CHECK(invoke(threaded).out == r.out);
    CHECK(slurp(counters) == slurp(fs::path(BELLTEST_GOLDEN_DIR) / "mc_seed42_counters.csv"));

    const auto zero = invoke({"mc", "--pairs", "0"});
    CHECK(zero.code == 1);
    CHECK(zero.err.find("--pairs") != std::string::npos);
    CHECK(invoke({"mc", "--ineq", "chsh"}).code == 1);
    CHECK(invoke({"mc", "--ineq", "ardehali28", "--bootstrap", "--pairs", "10"}).code == 1);
}

TEST_CASE("mc seed falls back to the environment")
{
    const std::vector<std::string> base{"mc", "--pairs", "50000", "--force-F", "1"};
    ::setenv("BELLTEST_SEED", "42", 1);
    const auto env = invoke(base);
    ::unsetenv("BELLTEST_SEED");
    auto flagged = base;
    flagged.insert(flagged.end(), {"--seed", "42"});
    CHECK(env.code == 0);
    CHECK(env.out == invoke(flagged).out);
    CHECK(invoke(base).out == env.out);  // default seed is 42 too

    ::setenv("BELLTEST_SEED", "7", 1);
    CHECK(invoke(flagged).out == env.out);  // --seed wins
    CHECK(invoke(base).out != env.out);
    ::setenv("BELLTEST_SEED", "seven", 1);
    const auto bad = invoke(base);
    ::unsetenv("BELLTEST_SEED");
    CHECK(bad.code == 1);
    CHECK(bad.err.find("BELLTEST_SEED") != std::string::npos);
}

TEST_CASE("mc extras")
{
    const auto boot = invoke({"mc", "--pairs", "300000", "--force-F", "1", "--bootstrap"});
    CHECK(boot.code == 0);
    CHECK(boot.out.find("\"bootstrap_std_error\"") != std::string::npos);
    const auto full = invoke({"mc", "--ineq", "ardehali28", "--pairs", "300000", "--format", "csv"});
    CHECK(full.code == 0);
    CHECK(full.out.rfind("name,lhs,bound,sense,margin,violation_factor,violated,std_error,sigma_distance", 0) == 0);
    CHECK(invoke({"mc", "--ineq", "ardehali31", "--angles", "0,10,50,50", "--pairs", "100"}).code == 1);
    CHECK(invoke({"mc", "--source", "qm-real", "--phi", "0"}).code == 1);
}

TEST_CASE("scan")
{
    const auto surface = scratch("surface.csv");
    const auto r = invoke({"scan", "--workers", "4", "--surface", surface.string()});
    CHECK(r.code == 0);
    CHECK(r.out.find("\"best_differences\": [\n    120.0,\n    120.0,\n    120.0,\n    0.0") !=
          std::string::npos);
    check_golden("scan_default.json", r.out);
    const auto csv = slurp(surface);
    CHECK(csv.rfind("a,b,a_prime,b_prime,lhs\n", 0) == 0);

    const auto bad = invoke({"scan", "--step", "60"});
    CHECK(bad.code == 1);
    CHECK(bad.err.find("--step") != std::string::npos);
    CHECK(invoke({"scan", "--ineq", "chsh"}).code == 1);
    CHECK(invoke({"scan", "--rounds", "-1"}).code == 1);
}

TEST_CASE("help states the illustrative defaults")
{
    const auto h = invoke({"eval", "--help"});
    CHECK(h.code == 0);
    CHECK(h.out.find("illustrative") != std::string::npos);
    CHECK(h.out.find("0.2") != std::string::npos);
    CHECK(h.out.find("30") != std::string::npos);
}

TEST_CASE("the installed binary behaves like the in-process entry point")
{
    const auto out = scratch("binary_out.json");
    const std::string cmd = std::string("\"") + BELLTEST_CLI_PATH + "\" verify-theorem > \"" +
                            out.string() + "\"";
    CHECK(std::system(cmd.c_str()) == 0);
    CHECK(slurp(out) == invoke({"verify-theorem"}).out);
    const std::string bad = std::string("\"") + BELLTEST_CLI_PATH + "\" mc --pairs 0 2>/dev/null";
    const int status = std::system(bad.c_str());
    CHECK(WEXITSTATUS(status) == 1);
}

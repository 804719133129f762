#include <doctest.h>

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

using json = nlohmann::json;
namespace fs = std::filesystem;

namespace {

#ifndef NQLAB_CLI_PATH
#error "NQLAB_CLI_PATH must point at the CLI binary"
#endif

struct Sandbox {
    fs::path dir;
    Sandbox() {
        dir = fs::temp_directory_path() /
              ("nqlab_cli_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~Sandbox() { fs::remove_all(dir); }
    std::string path(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args) {
    std::string cmd = std::string(NQLAB_CLI_PATH) + " " + args + " 2>/dev/null";
    int status = std::system(cmd.c_str());
    return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    REQUIRE(in.good());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace

TEST_CASE("born-test: canonical weights pass at 1e5 trials") {
    Sandbox sb;
    std::string out = sb.path("bt");
    int rc = run("born-test --set weights=0.5,0.3,0.2 --set trials=100000 "
                 "--seed 42 --format json --out " + out);
    REQUIRE(rc == 0);
    auto rep = json::parse(slurp(out + ".json"));
    CHECK(rep["pass"] == true);
    CHECK(rep["trials"] == 100000);
    CHECK(rep["p_value"].get<double>() > 0.01);

    // manifest recorded next to the output
    auto man = json::parse(slurp(out + ".manifest.json"));
    CHECK(man["command"] == "born-test");
    CHECK(man["seed"] == 42);
    CHECK(man["parameters"]["weights"] == "0.5,0.3,0.2");
    CHECK(man["outputs"].size() == 1);
}

TEST_CASE("lifetime: N = 1e9 lands in the 10^3 s tier") {
    Sandbox sb;
    std::string out = sb.path("lt");
    int rc = run("lifetime --set N=1e9 --set a=1e-10 --format json --out " + out);
    REQUIRE(rc == 0);
    auto table = json::parse(slurp(out + ".json"));
    REQUIRE(table.size() == 1);
    CHECK(table[0]["log10_tier"] == 3);
    double tau = table[0]["tau_s"].get<double>();
    CHECK(tau > 1e3);
    CHECK(tau < 1e4);
}

TEST_CASE("presets emits the four experiment rows") {
    Sandbox sb;
    std::string out = sb.path("pr");
    REQUIRE(run("presets --format json --out " + out) == 0);
    auto table = json::parse(slurp(out + ".json"));
    REQUIRE(table.size() == 4);
    CHECK(table[0]["name"] == "Vienna");
    CHECK(table[2]["formula"] == "apparatus");
}

TEST_CASE("pde-run: theta=1 and linear engines give byte-identical CSVs") {
    Sandbox sb;
    std::string common = "--set grid_n=128 --set dx=0.125 --set x0=-8 "
                         "--set t_max=0.1 --set snapshot_every=0.05 --out ";
    REQUIRE(run("pde-run --set engine=theta --set theta=1 " + common +
                sb.path("th")) == 0);
    REQUIRE(run("pde-run --set engine=linear " + common + sb.path("li")) == 0);
    for (const char* s : {"_snap000.csv", "_snap001.csv", "_snap002.csv"})
        CHECK(slurp(sb.path("th") + s) == slurp(sb.path("li") + s));
    // run manifest carries the residual report
    auto runinfo = json::parse(slurp(sb.path("th") + ".run.json"));
    CHECK(runinfo["times"].size() == 3);
    CHECK(runinfo.contains("residual"));
}

TEST_CASE("unknown keys are rejected with exit status 2") {
    Sandbox sb;
    CHECK(run("born-test --set weights=0.5,0.5 --set trials=10 "
              "--set bogus=1 --out " + sb.path("x")) == 2);
    CHECK(run("collapse --set weights=0.5,0.5 --set nope=3 --out " +
              sb.path("y")) == 2);
    // missing required keys are validation failures too
    CHECK(run("born-test --set weights=0.5,0.5 --out " + sb.path("z")) == 2);
    CHECK_FALSE(fs::exists(sb.path("x") + ".csv"));
}

TEST_CASE("config file with CLI override precedence") {
    Sandbox sb;
    std::string conf = sb.path("run.conf");
    {
        std::ofstream f(conf);
        f << "# ensemble settings\n"
          << "weights = 0.5,0.5\n"
          << "trials = 1000\n";
    }
    std::string out = sb.path("cb");
    REQUIRE(run("born-test --config " + conf +
                " --set trials=2000 --seed 1 --format json --out " + out) == 0);
    auto rep = json::parse(slurp(out + ".json"));
    CHECK(rep["trials"] == 2000);  // --set wins over the file
    auto man = json::parse(slurp(out + ".manifest.json"));
    CHECK(man["parameters"]["trials"] == "2000");
}

TEST_CASE("identical configs produce byte-identical outputs") {
    Sandbox sb;
    std::string args = "born-test --set weights=0.5,0.3,0.2 --set trials=20000 "
                       "--seed 5 --format json --out ";
    REQUIRE(run(args + sb.path("a") + " --set parallelism=1") == 0);
    REQUIRE(run(args + sb.path("b") + " --set parallelism=8") == 0);
    CHECK(slurp(sb.path("a") + ".json") == slurp(sb.path("b") + ".json"));

    std::string coll = "collapse --set weights=0.6,0.4 --set gamma=2 "
                       "--set t_max=1 --set dt=0.1 --seed 9 --out ";
    REQUIRE(run(coll + sb.path("c1")) == 0);
    REQUIRE(run(coll + sb.path("c2")) == 0);
    CHECK(slurp(sb.path("c1") + ".csv") == slurp(sb.path("c2") + ".csv"));
}

TEST_CASE("collapse trajectory CSV has the documented shape") {
    Sandbox sb;
    std::string out = sb.path("col");
    REQUIRE(run("collapse --set weights=0.5,0.5 --set q=1,0 --set gamma=1 "
                "--set t_max=2 --set dt=0.5 --out " + out) == 0);
    std::istringstream csv(slurp(out + ".csv"));
    std::string header;
    std::getline(csv, header);
    CHECK(header == "t,pop_1,pop_2");
    std::size_t rows = 0;
    for (std::string line; std::getline(csv, line);)
        if (!line.empty()) ++rows;
    CHECK(rows == 5);
    CHECK(fs::exists(out + ".plot.json"));
}

TEST_CASE("measure: discriminator run emits repeat probability") {
    Sandbox sb;
    std::string out = sb.path("ms");
    REQUIRE(run("measure --set weights=0.5,0.3,0.2 --set trials=5000 "
                "--set t_partial=0 --set gamma=0.9 --seed 7 --format json --out " +
                out) == 0);
    auto rep = json::parse(slurp(out + ".json"));
    CHECK(rep["trials"] == 5000);
    double p = rep["repeat_probability"].get<double>();
    // at t_partial = 0 the repeat probability is sum of squared weights
    CHECK(std::abs(p - 0.38) < 0.03);
}

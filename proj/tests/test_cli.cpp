#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <sys/wait.h>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <string>

#include "doctest.h"
#include "helpers.hpp"
#include "telephase/optimizer.hpp"

using namespace telephase;
using telephase::test::rel_err;

namespace {

struct CmdResult {
    int exit_code = -1;
    std::string out;
    std::string err;
};

std::string slurp(const std::string& path) {
    std::ifstream f(path);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
}

CmdResult run_cli(const std::string& args, const std::string& env = "") {
    const std::string out_f = "cli_stdout.tmp";
    const std::string err_f = "cli_stderr.tmp";
    const std::string cmd =
        env + " " + std::string(TELEPHASE_BIN_PATH) + " " + args + " >" + out_f + " 2>" + err_f;
    const int rc = std::system(cmd.c_str());
    CmdResult res;
    res.exit_code = WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
    res.out = slurp(out_f);
    res.err = slurp(err_f);
    std::remove(out_f.c_str());
    std::remove(err_f.c_str());
    return res;
}

bool contains(const std::string& hay, const std::string& needle) {
    return hay.find(needle) != std::string::npos;
}

}  // namespace

TEST_CASE("point at unit gains cross-checks against the closed forms") {
    const CmdResult r = run_cli("point --alpha 1 --phi 0.1 --r 1 --m 2 --eta1 0.9");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "status: OK"));
    CHECK(contains(r.out, "mean_x"));
    CHECK(contains(r.out, "enhancement"));
}

TEST_CASE("point validation failures exit 2 and name the field") {
    const CmdResult r = run_cli("point --alpha 1 --eta1 1.2");
    CHECK(r.exit_code == 2);
    CHECK(contains(r.err, "eta1 must be in [0,1]"));
}

TEST_CASE("point with non-unit gains marks closed forms not applicable") {
    const CmdResult r = run_cli("point --alpha 1 --phi 0.1 --r 1 --m 2 --gx 0.7 --gp 1.3");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "n/a"));
    CHECK(contains(r.out, "not applicable"));
}

TEST_CASE("verify passes on a seeded grid and fails the negative control") {
    const CmdResult ok = run_cli("verify --n-points 50 --seed 42");
    CHECK(ok.exit_code == 0);
    CHECK(contains(ok.out, "verdict: PASS"));

    const CmdResult bad = run_cli("verify --n-points 50 --seed 42 --corrupt-convention");
    CHECK(bad.exit_code == 1);
    CHECK(contains(bad.out, "verdict: FAIL"));
}

TEST_CASE("verify seed can come from the environment") {
    const CmdResult r = run_cli("verify --n-points 20", "TELEPHASE_SEED=99");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "seed 99"));
}

TEST_CASE("optimize emits a single csv row matching a single-point sweep") {
    const std::string flags = "--r 1 --n-total 30 --unit-gains";
    const CmdResult opt = run_cli("optimize " + flags);
    const CmdResult sw = run_cli("sweep --r-list 1 --n-total-list 30 --unit-gains --workers 1");
    CHECK(opt.exit_code == 0);
    CHECK(sw.exit_code == 0);
    CHECK(opt.out == sw.out);
    CHECK(contains(opt.out, sweep_csv_header()));
}

TEST_CASE("sweep csv round-trips through the parser and re-evaluates") {
    const CmdResult r =
        run_cli("sweep --r-list 0.8,1.4 --n-total-list 50 --eta1-list 0.92 --unit-gains "
                "--workers 2 -o sweep_out.tmp");
    CHECK(r.exit_code == 0);
    std::ifstream f("sweep_out.tmp");
    const auto rows = parse_sweep_csv(f);
    REQUIRE(rows.size() == 2);
    for (const auto& row : rows) {
        CHECK(row.optimum.feasible);
        const Evaluation re =
            evaluate(row.optimum.m, row.optimum.g_x, row.optimum.g_p, row.constraint);
        CHECK(rel_err(re.sigma, row.optimum.sigma) < 1e-9);
    }
    std::remove("sweep_out.tmp");
}

TEST_CASE("sweep output does not depend on the worker count") {
    const std::string args = "sweep --r-list 0.5,1,1.5 --n-total-list 40 --unit-gains";
    const CmdResult w1 = run_cli(args + " --workers 1");
    const CmdResult w3 = run_cli(args + " --workers 3");
    CHECK(w1.exit_code == 0);
    CHECK(w1.out == w3.out);
}

TEST_CASE("montecarlo reports z-scores and reproduces byte-identical output") {
    const std::string args =
        "montecarlo --alpha 1 --phi 0.1 --r 1 --m 2 --n-traj 20000 --seed 7 --z-max 6";
    const CmdResult a = run_cli(args);
    CHECK(a.exit_code == 0);
    CHECK(contains(a.out, "verdict: PASS"));
    const CmdResult b = run_cli(args);
    CHECK(a.out == b.out);
}

TEST_CASE("montecarlo with a tiny sample still runs under a wide tolerance") {
    const CmdResult r = run_cli(
        "montecarlo --alpha 1 --phi 0.1 --r 1 --m 1 --n-traj 100 --seed 3 --z-max 50");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "stderr"));
}

TEST_CASE("config file feeds options and flags win over it") {
    {
        std::ofstream cfg("point_cfg.tmp");
        cfg << "alpha=2\n";
        cfg << "eta1=0.5\n";
    }
    const CmdResult r = run_cli("point --config point_cfg.tmp --phi 0.1");
    CHECK(r.exit_code == 0);
    CHECK(contains(r.out, "alpha=2"));
    CHECK(contains(r.out, "eta1=0.5"));

    const CmdResult over = run_cli("point --config point_cfg.tmp --phi 0.1 --alpha 3");
    CHECK(over.exit_code == 0);
    CHECK(contains(over.out, "alpha=3"));

    {
        std::ofstream cfg("point_cfg.tmp");
        cfg << "no_such_key=1\n";
    }
    const CmdResult bad = run_cli("point --config point_cfg.tmp");
    CHECK(bad.exit_code == 2);
    std::remove("point_cfg.tmp");
}

TEST_CASE("unknown flags exit 2") {
    const CmdResult r = run_cli("point --no-such-flag 1");
    CHECK(r.exit_code == 2);
}

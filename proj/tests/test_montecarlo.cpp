#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cmath>

#include "doctest.h"
#include "helpers.hpp"
#include "telephase/montecarlo.hpp"

using namespace telephase;
using telephase::test::rel_err;

TEST_CASE("trajectories are bit-identical for a fixed substream") {
    ProtocolParams p;
    p.alpha = 1.0;
    p.phi = 0.1;
    p.r = 1.0;
    p.m = 2;
    p.eta1 = 0.9;
    RandomStream a = RandomStream::substream(7, 123);
    RandomStream b = RandomStream::substream(7, 123);
    const TrajectoryResult ta = sample_trajectory(p, a);
    const TrajectoryResult tb = sample_trajectory(p, b);
    CHECK(ta.final_x == tb.final_x);
    REQUIRE(ta.per_pass_photons.size() == tb.per_pass_photons.size());
    for (std::size_t i = 0; i < ta.per_pass_photons.size(); ++i) {
        CHECK(ta.per_pass_photons[i] == tb.per_pass_photons[i]);
    }

    RandomStream c = RandomStream::substream(7, 124);
    CHECK(sample_trajectory(p, c).final_x != ta.final_x);
}

TEST_CASE("estimates do not depend on the worker count") {
    ProtocolParams p;
    p.alpha = 1.0;
    p.phi = 0.1;
    p.r = 1.0;
    p.m = 2;
    const EnsembleEstimate e1 = estimate(p, 30000, 99, 1);
    const EnsembleEstimate e4 = estimate(p, 30000, 99, 4);
    CHECK(e1.mean_x_hat == e4.mean_x_hat);
    CHECK(e1.var_x_hat == e4.var_x_hat);
    CHECK(e1.stderr_mean == e4.stderr_mean);
    CHECK(e1.stderr_var == e4.stderr_var);
    for (std::size_t i = 0; i < e1.ledger_mean.size(); ++i) {
        CHECK(e1.ledger_mean[i] == e4.ledger_mean[i]);
    }
}

TEST_CASE("bare coherent homodyne statistics") {
    ProtocolParams p;
    p.alpha = 1.3;
    p.phi = 0.4;
    p.m = 0;
    const EnsembleEstimate est = estimate(p, 200000, 5, 4);
    CHECK(std::abs(est.mean_x_hat - 1.3 * std::sin(0.4)) < 4.0 * est.stderr_mean);
    CHECK(std::abs(est.var_x_hat - 0.25) < 4.0 * est.stderr_var);
    CHECK(est.stderr_mean > 0.0);
    CHECK(est.stderr_var > 0.0);
}

TEST_CASE("high squeezing reproduces the multi-pass fringe") {
    ProtocolParams p;
    p.alpha = 1.0;
    p.phi = 0.3;
    p.r = 15.0;
    p.m = 2;
    const EnsembleEstimate est = estimate(p, 100000, 11, 4);
    CHECK(std::abs(est.mean_x_hat - std::sin(0.9)) < 4.0 * est.stderr_mean);
}

TEST_CASE("non-unit gains and loss agree with the ensemble simulator") {
    ProtocolParams p;
    p.alpha = 1.0;
    p.phi = 0.1;
    p.r = 1.0;
    p.m = 2;
    p.g_x = 0.7;
    p.g_p = 1.3;
    p.eta1 = 0.9;
    p.eta2 = 0.95;
    p.n_th = 0.05;
    const ProtocolMoments ens = run_ensemble(p);
    const EnsembleEstimate est = estimate(p, 200000, 17, 4);
    CHECK(std::abs(est.mean_x_hat - ens.mean_x) < 4.0 * est.stderr_mean);
    CHECK(std::abs(est.var_x_hat - ens.var_x) < 4.0 * est.stderr_var);
    REQUIRE(est.ledger_mean.size() == ens.per_pass_photons.size());
    for (std::size_t i = 0; i < est.ledger_mean.size(); ++i) {
        if (est.ledger_stderr[i] > 0.0) {
            CHECK(std::abs(est.ledger_mean[i] - ens.per_pass_photons[i]) <
                  4.0 * est.ledger_stderr[i]);
        } else {
            // the first pass sees the unconditioned probe, a constant
            CHECK(std::abs(est.ledger_mean[i] - ens.per_pass_photons[i]) < 1e-12);
        }
    }
}

TEST_CASE("two samples still give finite positive standard errors") {
    ProtocolParams p;
    p.alpha = 0.8;
    p.phi = 0.2;
    p.m = 1;
    const EnsembleEstimate est = estimate(p, 2, 3, 1);
    CHECK(std::isfinite(est.stderr_mean));
    CHECK(std::isfinite(est.stderr_var));
    CHECK(est.stderr_mean > 0.0);
    CHECK(est.stderr_var > 0.0);
    CHECK_THROWS_AS(estimate(p, 1, 3, 1), invalid_parameter_error);
}

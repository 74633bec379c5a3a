#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

#include "CLI11.hpp"
#include "telephase/formulas.hpp"
#include "telephase/montecarlo.hpp"
#include "telephase/optimizer.hpp"
#include "telephase/verify.hpp"

namespace {

using namespace telephase;

std::string fmt(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

double rel_delta(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

int resolve_workers(int workers) {
    if (workers > 0) return workers;
    const unsigned hw = std::thread::hardware_concurrency();
    return hw > 0 ? static_cast<int>(hw) : 1;
}

std::vector<double> parse_list(const std::string& text, const std::string& field) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            out.push_back(std::stod(item));
        } catch (const std::exception&) {
            throw invalid_parameter_error(field + " must be a comma-separated list of numbers");
        }
    }
    if (out.empty()) throw invalid_parameter_error(field + " must be non-empty");
    return out;
}

void write_text(const std::string& path, const std::string& text) {
    if (path.empty() || path == "-") {
        std::cout << text;
        return;
    }
    std::ofstream f(path);
    if (!f) throw invalid_parameter_error("cannot open output file " + path);
    f << text;
}

int cmd_point(const ProtocolParams& p) {
    p.validate();
    const ProtocolMoments sim = run_ensemble(p);
    const bool unit = (p.g_x == 1.0 && p.g_p == 1.0);
    std::optional<LossyMoments> ref;
    if (unit) {
        try {
            ref = lossy_moments(p);
        } catch (const sensitivity_undefined_error&) {
        }
    }

    std::printf("alpha=%s phi=%s r=%s m=%d g_x=%s g_p=%s eta1=%s eta2=%s n_th=%s\n",
                fmt(p.alpha).c_str(), fmt(p.phi).c_str(), fmt(p.r).c_str(), p.m,
                fmt(p.g_x).c_str(), fmt(p.g_p).c_str(), fmt(p.eta1).c_str(),
                fmt(p.eta2).c_str(), fmt(p.n_th).c_str());
    std::printf("%-14s %-20s %-20s %s\n", "quantity", "simulator", "closed-form", "rel-delta");

    double worst = 0.0;
    const auto row = [&](const char* name, double sim_v, std::optional<double> ref_v) {
        if (ref_v) {
            const double d = rel_delta(sim_v, *ref_v);
            worst = std::max(worst, d);
            std::printf("%-14s %-20s %-20s %s\n", name, fmt(sim_v).c_str(), fmt(*ref_v).c_str(),
                        fmt(d).c_str());
        } else {
            std::printf("%-14s %-20s %-20s %s\n", name, fmt(sim_v).c_str(), "n/a", "n/a");
        }
    };

    row("mean_x", sim.mean_x, ref ? std::optional<double>(ref->mean_x) : std::nullopt);
    row("var_x", sim.var_x, ref ? std::optional<double>(ref->var_x) : std::nullopt);
    if (sim.sigma_defined) {
        row("sigma", sim.sigma, ref ? std::optional<double>(ref->sigma) : std::nullopt);
    } else {
        std::printf("%-14s %-20s %-20s %s\n", "sigma", "undefined", "n/a", "n/a");
    }
    row("n_total", sim.n_total, ref ? std::optional<double>(ref->n_total) : std::nullopt);
    row("mean_p", sim.mean_p, std::nullopt);
    row("var_p", sim.var_p, std::nullopt);
    row("dmeanx_dphi", sim.dmeanx_dphi, std::nullopt);

    std::string ledger;
    for (double v : sim.per_pass_photons) {
        if (!ledger.empty()) ledger += ' ';
        ledger += fmt(v);
    }
    std::printf("per_pass_photons %s\n", ledger.c_str());

    if (sim.sigma_defined && sim.n_total > 0.0) {
        try {
            const double sc = coherent_baseline_sigma(sim.n_total, p.phi, p.eta1);
            const double enh = sc / sim.sigma;
            std::printf("sigma_coh=%s enhancement=%s enhancement_db=%s\n", fmt(sc).c_str(),
                        fmt(enh).c_str(), fmt(20.0 * std::log10(enh)).c_str());
        } catch (const sensitivity_undefined_error&) {
            std::printf("sigma_coh=undefined\n");
        }
    }

    if (ref) {
        std::printf("status: %s (max relative delta %s)\n", worst < 1e-9 ? "OK" : "MISMATCH",
                    fmt(worst).c_str());
    } else if (!unit) {
        std::printf("status: closed-form columns not applicable for non-unit gains\n");
    } else {
        std::printf("status: closed-form sensitivity undefined at this phi\n");
    }
    return 0;
}

int cmd_verify(int n_points, std::uint64_t seed, bool corrupt) {
    const VerifyResult vr = verify_oracle_grid(n_points, seed, corrupt);
    const ProtocolParams& w = vr.worst_params;
    std::printf("checked %d points (seed %llu)\n", vr.n_points,
                static_cast<unsigned long long>(seed));
    std::printf("max relative error %s in %s\n", fmt(vr.max_rel_err).c_str(),
                vr.worst_field.c_str());
    std::printf("worst point: alpha=%s phi=%s r=%s m=%d eta1=%s eta2=%s n_th=%s\n",
                fmt(w.alpha).c_str(), fmt(w.phi).c_str(), fmt(w.r).c_str(), w.m,
                fmt(w.eta1).c_str(), fmt(w.eta2).c_str(), fmt(w.n_th).c_str());
    const bool pass = vr.max_rel_err < 1e-9;
    std::printf("verdict: %s (threshold 1e-9)\n", pass ? "PASS" : "FAIL");
    return pass ? 0 : 1;
}

std::string rows_to_csv(const std::vector<SweepRow>& rows) {
    std::string text = sweep_csv_header() + '\n';
    for (const auto& row : rows) {
        text += format_sweep_row(row) + '\n';
        if (row.optimum.gain_on_boundary) {
            std::fprintf(stderr, "warning: gain search hit the box boundary at r=%s n_total=%s\n",
                         fmt(row.constraint.r).c_str(),
                         fmt(row.constraint.n_total_budget).c_str());
        }
        if (row.error) {
            std::fprintf(stderr, "warning: point r=%s n_total=%s failed: %s\n",
                         fmt(row.constraint.r).c_str(),
                         fmt(row.constraint.n_total_budget).c_str(), row.message.c_str());
        }
    }
    return text;
}

int cmd_optimize(const Constraint& c, const std::string& out_path) {
    c.validate();
    std::vector<SweepRow> rows(1);
    rows[0].constraint = c;
    rows[0].optimum = optimize(c);
    write_text(out_path, rows_to_csv(rows));
    return 0;
}

int cmd_sweep(const std::vector<double>& r_list, const std::vector<double>& n_list,
              const std::vector<double>& eta1_list, const std::vector<double>& eta2_list,
              const std::vector<double>& nth_list, bool unit_gains, int m_max, int workers,
              const std::string& out_path) {
    std::vector<Constraint> grid;
    for (double r : r_list) {
        for (double n : n_list) {
            for (double e1 : eta1_list) {
                for (double e2 : eta2_list) {
                    for (double nth : nth_list) {
                        Constraint c;
                        c.r = r;
                        c.n_total_budget = n;
                        c.eta1 = e1;
                        c.eta2 = e2;
                        c.n_th = nth;
                        c.unit_gains = unit_gains;
                        c.m_max = m_max;
                        c.validate();
                        grid.push_back(c);
                    }
                }
            }
        }
    }
    const auto rows = sweep(grid, resolve_workers(workers));
    write_text(out_path, rows_to_csv(rows));
    return 0;
}

int cmd_montecarlo(const ProtocolParams& p, long n_traj, std::uint64_t seed, int workers,
                   double z_max) {
    p.validate();
    if (!(z_max > 0.0)) throw invalid_parameter_error("z_max must be > 0");
    const ProtocolMoments ens = run_ensemble(p);
    const EnsembleEstimate est = estimate(p, n_traj, seed, resolve_workers(workers));

    const double z_mean = (est.mean_x_hat - ens.mean_x) / est.stderr_mean;
    const double z_var = (est.var_x_hat - ens.var_x) / est.stderr_var;

    std::printf("n_traj=%ld seed=%llu\n", n_traj, static_cast<unsigned long long>(seed));
    std::printf("%-8s %-20s %-20s %-20s %s\n", "", "ensemble", "montecarlo", "stderr", "z");
    std::printf("%-8s %-20s %-20s %-20s %s\n", "mean_x", fmt(ens.mean_x).c_str(),
                fmt(est.mean_x_hat).c_str(), fmt(est.stderr_mean).c_str(), fmt(z_mean).c_str());
    std::printf("%-8s %-20s %-20s %-20s %s\n", "var_x", fmt(ens.var_x).c_str(),
                fmt(est.var_x_hat).c_str(), fmt(est.stderr_var).c_str(), fmt(z_var).c_str());

    double z_ledger = 0.0;
    for (std::size_t i = 0; i < est.ledger_mean.size(); ++i) {
        if (est.ledger_stderr[i] > 0.0) {
            z_ledger = std::max(z_ledger, std::abs(est.ledger_mean[i] -
                                                   ens.per_pass_photons[i]) /
                                              est.ledger_stderr[i]);
        }
    }
    std::printf("ledger: max |z| over %zu passes = %s\n", est.ledger_mean.size(),
                fmt(z_ledger).c_str());

    const bool pass = std::abs(z_mean) < z_max && std::abs(z_var) < z_max;
    std::printf("verdict: %s (|z| threshold %s)\n", pass ? "PASS" : "FAIL", fmt(z_max).c_str());
    return pass ? 0 : 1;
}

void add_params_options(CLI::App* sub, ProtocolParams& p) {
    sub->add_option("--alpha", p.alpha, "probe amplitude");
    sub->add_option("--phi", p.phi, "phase per pass (radians)");
    sub->add_option("--r", p.r, "squeezing parameter");
    sub->add_option("--m", p.m, "number of teleportations");
    sub->add_option("--gx", p.g_x, "x feedback gain");
    sub->add_option("--gp", p.g_p, "p feedback gain");
    sub->add_option("--eta1", p.eta1, "phase-shift arm transmission");
    sub->add_option("--eta2", p.eta2, "resource transmission per mode");
    sub->add_option("--nth", p.n_th, "thermal photons at the eta2 beamsplitters");
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"teleportation-amplified phase estimation toolkit"};
    app.require_subcommand(1);

    ProtocolParams point_params;
    auto* point = app.add_subcommand("point", "simulate one parameter point against the "
                                              "closed forms");
    add_params_options(point, point_params);
    point->set_config("--config", "", "read options from a key=value file");

    int verify_n = 1000;
    std::uint64_t verify_seed = 42;
    bool verify_corrupt = false;
    auto* verify = app.add_subcommand("verify", "random-grid check of simulator vs closed "
                                                "forms at unit gains");
    verify->add_option("--n-points", verify_n, "number of random points");
    verify->add_option("--seed", verify_seed, "grid seed")->envname("TELEPHASE_SEED");
    verify->add_flag("--corrupt-convention", verify_corrupt)->group("");
    verify->set_config("--config", "", "read options from a key=value file");

    Constraint opt_c;
    std::string opt_out = "-";
    auto* opt = app.add_subcommand("optimize", "best (m, alpha, gains) for one budget point");
    opt->add_option("--r", opt_c.r, "available squeezing");
    opt->add_option("--n-total", opt_c.n_total_budget, "total probe photon budget");
    opt->add_option("--eta1", opt_c.eta1, "phase-shift arm transmission");
    opt->add_option("--eta2", opt_c.eta2, "resource transmission per mode");
    opt->add_option("--nth", opt_c.n_th, "thermal photons at the eta2 beamsplitters");
    opt->add_flag("--unit-gains", opt_c.unit_gains, "restrict to g_x = g_p = 1");
    opt->add_option("--m-max", opt_c.m_max, "cap on the teleportation count");
    opt->add_option("--output,-o", opt_out, "CSV output path ('-' for stdout)");
    opt->set_config("--config", "", "read options from a key=value file");

    std::string sw_r = "1", sw_n = "100", sw_eta1 = "1", sw_eta2 = "1", sw_nth = "0";
    bool sw_unit = false;
    int sw_m_max = std::numeric_limits<int>::max();
    int sw_workers = 0;
    std::string sw_out = "-";
    auto* sw = app.add_subcommand("sweep", "optimize over a grid of budget points, CSV out");
    sw->add_option("--r-list", sw_r, "comma-separated r values");
    sw->add_option("--n-total-list", sw_n, "comma-separated photon budgets");
    sw->add_option("--eta1-list", sw_eta1, "comma-separated eta1 values");
    sw->add_option("--eta2-list", sw_eta2, "comma-separated eta2 values");
    sw->add_option("--nth-list", sw_nth, "comma-separated n_th values");
    sw->add_flag("--unit-gains", sw_unit, "restrict to g_x = g_p = 1");
    sw->add_option("--m-max", sw_m_max, "cap on the teleportation count");
    sw->add_option("--workers", sw_workers, "worker threads (0 = hardware)");
    sw->add_option("--output,-o", sw_out, "CSV output path ('-' for stdout)");
    sw->set_config("--config", "", "read options from a key=value file");

    ProtocolParams mc_params;
    long mc_n = 1000000;
    std::uint64_t mc_seed = 42;
    int mc_workers = 0;
    double mc_zmax = 4.0;
    auto* mc = app.add_subcommand("montecarlo", "trajectory-sampled check against the "
                                                "ensemble simulator");
    add_params_options(mc, mc_params);
    mc->add_option("--n-traj", mc_n, "number of trajectories");
    mc->add_option("--seed", mc_seed, "stream seed")->envname("TELEPHASE_SEED");
    mc->add_option("--workers", mc_workers, "worker threads (0 = hardware)");
    mc->add_option("--z-max", mc_zmax, "|z| acceptance threshold");
    mc->set_config("--config", "", "read options from a key=value file");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (*point) return cmd_point(point_params);
        if (*verify) return cmd_verify(verify_n, verify_seed, verify_corrupt);
        if (*opt) return cmd_optimize(opt_c, opt_out);
        if (*sw) {
            return cmd_sweep(parse_list(sw_r, "r-list"), parse_list(sw_n, "n-total-list"),
                             parse_list(sw_eta1, "eta1-list"), parse_list(sw_eta2, "eta2-list"),
                             parse_list(sw_nth, "nth-list"), sw_unit, sw_m_max, sw_workers,
                             sw_out);
        }
        if (*mc) return cmd_montecarlo(mc_params, mc_n, mc_seed, mc_workers, mc_zmax);
    } catch (const invalid_parameter_error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    return 0;
}

#include "telephase/optimizer.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <istream>
#include <sstream>
#include <thread>

#include "telephase/formulas.hpp"

namespace telephase {

void Constraint::validate() const {
    if (!std::isfinite(r) || r < 0.0) throw invalid_parameter_error("r must be finite and >= 0");
    if (!std::isfinite(n_total_budget) || n_total_budget <= 0.0) {
        throw invalid_parameter_error("n_total must be > 0");
    }
    if (!(eta1 >= 0.0 && eta1 <= 1.0)) throw invalid_parameter_error("eta1 must be in [0,1]");
    if (!(eta2 >= 0.0 && eta2 <= 1.0)) throw invalid_parameter_error("eta2 must be in [0,1]");
    if (!std::isfinite(n_th) || n_th < 0.0) throw invalid_parameter_error("n_th must be >= 0");
    if (m_max < 0) throw invalid_parameter_error("m_max must be >= 0");
}

std::optional<double> solve_alpha(int m, double g_x, double g_p, const Constraint& c) {
    c.validate();
    if (m < 0) throw invalid_parameter_error("m must be >= 0");
    ProtocolParams p{0.0, 0.0, c.r, m, g_x, g_p, c.eta1, c.eta2, c.n_th};
    const auto [a, b] = photon_budget_coefficients(p);
    if (c.n_total_budget < b) return std::nullopt;
    return std::sqrt((c.n_total_budget - b) / a);
}

Evaluation evaluate(int m, double g_x, double g_p, const Constraint& c) {
    const auto alpha = solve_alpha(m, g_x, g_p, c);
    if (!alpha) {
        throw infeasible_error("photon budget below the alpha-independent floor for this m");
    }
    ProtocolParams p{*alpha, 0.0, c.r, m, g_x, g_p, c.eta1, c.eta2, c.n_th};
    const ProtocolMoments mom = run_ensemble(p);
    if (!mom.sigma_defined) {
        throw sensitivity_undefined_error("sensitivity undefined: signal derivative vanishes");
    }
    Evaluation ev;
    ev.alpha = *alpha;
    ev.sigma = mom.sigma;
    ev.sigma_coh = coherent_baseline_sigma(c.n_total_budget, 0.0, c.eta1);
    ev.enhancement = ev.sigma_coh / ev.sigma;
    return ev;
}

namespace {

constexpr double kGainLo = 1e-4;  // numerical stand-in for the open end of (0, 2]
constexpr double kGainHi = 2.0;

struct MCandidate {
    bool found = false;
    Evaluation ev;
    double g_x = 1.0;
    double g_p = 1.0;
};

// Nelder-Mead on the gain plane, maximizing f; f returns -inf outside the
// box or at infeasible points.  Converged when the simplex diameter < 1e-6.
template <typename F>
Eigen::Vector2d nelder_mead_max(const F& f, double gx0, double gp0) {
    using V = Eigen::Vector2d;
    const double h = 0.05;
    std::array<V, 3> xs = {V(gx0, gp0), V(std::min(gx0 + h, kGainHi), gp0),
                           V(gx0, std::min(gp0 + h, kGainHi))};
    std::array<double, 3> fs = {f(xs[0]), f(xs[1]), f(xs[2])};

    const auto order = [&] {
        // best first
        if (fs[0] < fs[1]) { std::swap(fs[0], fs[1]); std::swap(xs[0], xs[1]); }
        if (fs[1] < fs[2]) { std::swap(fs[1], fs[2]); std::swap(xs[1], xs[2]); }
        if (fs[0] < fs[1]) { std::swap(fs[0], fs[1]); std::swap(xs[0], xs[1]); }
    };

    for (int iter = 0; iter < 400; ++iter) {
        order();
        const double diam = std::max({(xs[0] - xs[1]).norm(), (xs[0] - xs[2]).norm(),
                                      (xs[1] - xs[2]).norm()});
        if (diam < 1e-6) break;

        const V cen = (xs[0] + xs[1]) / 2.0;
        const V xr = cen + (cen - xs[2]);
        const double fr = f(xr);
        if (fr > fs[0]) {
            const V xe = cen + 2.0 * (cen - xs[2]);
            const double fe = f(xe);
            if (fe > fr) { xs[2] = xe; fs[2] = fe; }
            else { xs[2] = xr; fs[2] = fr; }
        } else if (fr > fs[1]) {
            xs[2] = xr;
            fs[2] = fr;
        } else {
            const V xc = cen + 0.5 * (xs[2] - cen);
            const double fc = f(xc);
            if (fc > fs[2]) {
                xs[2] = xc;
                fs[2] = fc;
            } else {
                for (int i = 1; i < 3; ++i) {
                    xs[i] = xs[0] + 0.5 * (xs[i] - xs[0]);
                    fs[i] = f(xs[i]);
                }
            }
        }
    }
    order();
    return xs[0];
}

MCandidate best_gains_for_m(int m, const Constraint& c) {
    const auto try_eval = [&](double gx, double gp) -> std::optional<Evaluation> {
        if (!(gx > kGainLo && gx <= kGainHi && gp > kGainLo && gp <= kGainHi)) {
            return std::nullopt;
        }
        try {
            return evaluate(m, gx, gp, c);
        } catch (const infeasible_error&) {
            return std::nullopt;
        } catch (const sensitivity_undefined_error&) {
            return std::nullopt;
        }
    };

    MCandidate best;
    const auto consider = [&](double gx, double gp) {
        const auto ev = try_eval(gx, gp);
        if (!ev) return;
        const bool better =
            !best.found || ev->enhancement > best.ev.enhancement ||
            (ev->enhancement == best.ev.enhancement &&
             (gx < best.g_x || (gx == best.g_x && gp < best.g_p)));
        if (better) best = {true, *ev, gx, gp};
    };

    consider(1.0, 1.0);
    if (c.unit_gains) return best;

    for (int i = 0; i < 5; ++i) {
        for (int j = 0; j < 5; ++j) {
            consider(0.5 + 0.25 * i, 0.5 + 0.25 * j);
        }
    }
    if (!best.found) return best;

    const auto obj = [&](const Eigen::Vector2d& g) {
        const auto ev = try_eval(g(0), g(1));
        return ev ? ev->enhancement : -std::numeric_limits<double>::infinity();
    };
    const Eigen::Vector2d top = nelder_mead_max(obj, best.g_x, best.g_p);
    consider(top(0), top(1));
    return best;
}

}  // namespace

Optimum optimize(const Constraint& c) {
    c.validate();
    const double r_lim = effective_squeezing(c.r, c.eta2, c.n_th);
    const double noise_cap = 20.0 * std::ceil(std::exp(2.0 * r_lim));
    long m_cap = static_cast<long>(std::min(noise_cap, 1e9));
    if (c.m_max < m_cap) m_cap = c.m_max;

    Optimum best;
    int stale = 0;
    for (long m = 0; m <= m_cap; ++m) {
        const MCandidate cand = best_gains_for_m(static_cast<int>(m), c);
        const double tol = 1e-12 * std::max(1.0, std::abs(best.enhancement));
        if (cand.found && (!best.feasible || cand.ev.enhancement > best.enhancement + tol)) {
            best.feasible = true;
            best.m = static_cast<int>(m);
            best.alpha = cand.ev.alpha;
            best.g_x = cand.g_x;
            best.g_p = cand.g_p;
            best.sigma = cand.ev.sigma;
            best.sigma_coh = cand.ev.sigma_coh;
            best.enhancement = cand.ev.enhancement;
            best.enhancement_db = 20.0 * std::log10(cand.ev.enhancement);
            best.gain_on_boundary =
                !c.unit_gains &&
                (cand.g_x <= 2.0 * kGainLo || cand.g_x >= kGainHi - 1e-6 ||
                 cand.g_p <= 2.0 * kGainLo || cand.g_p >= kGainHi - 1e-6);
            stale = 0;
        } else {
            ++stale;
        }
        // Infeasibility is monotone in m, so once the budget floor is crossed
        // and the best has gone stale the scan is done.  The unconditional
        // stale cap bounds the scan when heavy probe loss keeps every m
        // feasible but worthless.
        if (!cand.found && stale >= 50) break;
        if (stale >= 200) break;
    }
    return best;
}

std::vector<SweepRow> sweep(const std::vector<Constraint>& grid, int workers) {
    if (grid.empty()) throw invalid_parameter_error("sweep grid must be non-empty");
    if (workers < 1) throw invalid_parameter_error("workers must be >= 1");

    std::vector<SweepRow> rows(grid.size());
    const auto work = [&](std::size_t i) {
        rows[i].constraint = grid[i];
        try {
            rows[i].optimum = optimize(grid[i]);
        } catch (const std::exception& e) {
            rows[i].error = true;
            rows[i].message = e.what();
            rows[i].optimum = Optimum{};
        }
    };

    if (workers == 1 || grid.size() == 1) {
        for (std::size_t i = 0; i < grid.size(); ++i) work(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::thread> pool;
        const int nw = std::min<std::size_t>(workers, grid.size());
        pool.reserve(nw);
        for (int w = 0; w < nw; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next.fetch_add(1); i < grid.size();
                     i = next.fetch_add(1)) {
                    work(i);
                }
            });
        }
        for (auto& t : pool) t.join();
    }
    return rows;
}

namespace {

std::string fmt12(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

std::string sweep_csv_header() {
    return "r,n_total,eta1,eta2,n_th,unit_gains,m_opt,alpha,g_x,g_p,sigma,sigma_coh,"
           "enhancement,enhancement_db,feasible";
}

std::string format_sweep_row(const SweepRow& row) {
    const Constraint& c = row.constraint;
    const Optimum& o = row.optimum;
    std::string out;
    out += fmt12(c.r) + ',' + fmt12(c.n_total_budget) + ',' + fmt12(c.eta1) + ',' +
           fmt12(c.eta2) + ',' + fmt12(c.n_th) + ',';
    out += (c.unit_gains ? "1" : "0");
    out += ',' + std::to_string(o.m) + ',' + fmt12(o.alpha) + ',' + fmt12(o.g_x) + ',' +
           fmt12(o.g_p) + ',' + fmt12(o.sigma) + ',' + fmt12(o.sigma_coh) + ',' +
           fmt12(o.enhancement) + ',' + fmt12(o.enhancement_db) + ',';
    out += (o.feasible && !row.error ? "1" : "0");
    return out;
}

std::vector<SweepRow> parse_sweep_csv(std::istream& in) {
    std::string line;
    if (!std::getline(in, line) || line != sweep_csv_header()) {
        throw invalid_parameter_error("unrecognized sweep CSV header");
    }
    std::vector<SweepRow> rows;
    while (std::getline(in, line)) {
        if (line.empty()) continue;
        std::vector<std::string> fields;
        std::stringstream ss(line);
        std::string f;
        while (std::getline(ss, f, ',')) fields.push_back(f);
        if (fields.size() != 15) {
            throw invalid_parameter_error("sweep CSV row must have 15 fields");
        }
        SweepRow row;
        row.constraint.r = std::stod(fields[0]);
        row.constraint.n_total_budget = std::stod(fields[1]);
        row.constraint.eta1 = std::stod(fields[2]);
        row.constraint.eta2 = std::stod(fields[3]);
        row.constraint.n_th = std::stod(fields[4]);
        row.constraint.unit_gains = std::stod(fields[5]) != 0.0;
        row.optimum.m = static_cast<int>(std::stod(fields[6]));
        row.optimum.alpha = std::stod(fields[7]);
        row.optimum.g_x = std::stod(fields[8]);
        row.optimum.g_p = std::stod(fields[9]);
        row.optimum.sigma = std::stod(fields[10]);
        row.optimum.sigma_coh = std::stod(fields[11]);
        row.optimum.enhancement = std::stod(fields[12]);
        row.optimum.enhancement_db = std::stod(fields[13]);
        row.optimum.feasible = std::stod(fields[14]) != 0.0;
        rows.push_back(row);
    }
    return rows;
}

}  // namespace telephase

#pragma once

#include <iosfwd>
#include <limits>
#include <optional>
#include <string>
#include <vector>

#include "telephase/protocol.hpp"

namespace telephase {

struct Constraint {
    double r = 1.0;                // available squeezing
    double n_total_budget = 100.0; // total probe photons through the phase shift
    double eta1 = 1.0;
    double eta2 = 1.0;
    double n_th = 0.0;
    bool unit_gains = false;       // restrict the search to g_x = g_p = 1
    int m_max = std::numeric_limits<int>::max();

    void validate() const;
};

struct Optimum {
    int m = 0;
    double alpha = 0.0;
    double g_x = 1.0;
    double g_p = 1.0;
    double sigma = std::numeric_limits<double>::quiet_NaN();
    double sigma_coh = std::numeric_limits<double>::quiet_NaN();
    double enhancement = 0.0;     // sigma_coh / sigma
    double enhancement_db = 0.0;  // 10 log10(sigma_coh^2 / sigma^2)
    bool feasible = false;
    bool gain_on_boundary = false;  // gain search ended on the box boundary
};

struct SweepRow {
    Constraint constraint;
    Optimum optimum;
    bool error = false;
    std::string message;
};

// Largest alpha that fits the photon budget at the given (m, gains), via the
// exact quadratic n_total = A alpha^2 + B; nullopt when the budget is below B.
std::optional<double> solve_alpha(int m, double g_x, double g_p, const Constraint& c);

struct Evaluation {
    double alpha = 0.0;
    double sigma = 0.0;
    double sigma_coh = 0.0;
    double enhancement = 0.0;
};

// Runs the simulator at phi = 0 with the budget-solved alpha.
// Throws infeasible_error when solve_alpha has no solution.
Evaluation evaluate(int m, double g_x, double g_p, const Constraint& c);

// Scans m (and, unless unit_gains, the gain plane via a coarse grid plus
// Nelder-Mead) for the best enhancement.  Deterministic; ties break toward
// smaller m, then smaller g_x, then smaller g_p.
Optimum optimize(const Constraint& c);

// One optimize() per grid point; points may run concurrently but the output
// order always matches the input order.  Per-point failures are recorded
// in-row and never abort the sweep.
std::vector<SweepRow> sweep(const std::vector<Constraint>& grid, int workers = 1);

std::string sweep_csv_header();
std::string format_sweep_row(const SweepRow& row);  // 12 significant digits
std::vector<SweepRow> parse_sweep_csv(std::istream& in);

}  // namespace telephase

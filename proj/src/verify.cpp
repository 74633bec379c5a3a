#include "telephase/verify.hpp"

#include <cmath>

#include "telephase/formulas.hpp"
#include "telephase/rng.hpp"

namespace telephase {

namespace {

double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

}  // namespace

VerifyResult verify_oracle_grid(int n_points, std::uint64_t seed, bool corrupt_check) {
    if (n_points < 1) throw invalid_parameter_error("n_points must be >= 1");

    RandomStream rs(seed);
    VerifyResult res;
    res.n_points = n_points;

    for (int i = 0; i < n_points; ++i) {
        ProtocolParams p;
        p.alpha = 3.0 * rs.next_uniform();
        p.r = 3.0 * rs.next_uniform();
        p.m = std::min(50, static_cast<int>(51.0 * rs.next_uniform()));
        p.g_x = 1.0;
        p.g_p = 1.0;
        p.eta1 = 0.3 + 0.7 * rs.next_uniform();
        p.eta2 = 0.3 + 0.7 * rs.next_uniform();
        p.n_th = 0.1 * rs.next_uniform();
        // Relative comparison is ill-conditioned in the measure-zero
        // neighborhoods where the fringe or its derivative vanishes; the
        // seeded grid redraws phi away from them.
        do {
            p.phi = -1.0 + 2.0 * rs.next_uniform();
        } while (std::abs(std::sin((p.m + 1) * p.phi)) < 1e-4 ||
                 std::abs(std::cos((p.m + 1) * p.phi)) < 1e-4);
        if (p.alpha < 1e-6) p.alpha = 1e-6;

        const ProtocolMoments sim = run_ensemble(p);
        LossyMoments ref = lossy_moments(p);
        if (corrupt_check) {
            ref.mean_x *= 1.0 + 3e-9;
            ref.var_x *= 1.0 + 3e-9;
            ref.sigma *= 1.0 + 3e-9;
            ref.n_total *= 1.0 + 3e-9;
        }

        const auto record = [&](const char* field, double a, double b) {
            const double e = rel_err(a, b);
            if (e > res.max_rel_err) {
                res.max_rel_err = e;
                res.worst_field = field;
                res.worst_params = p;
            }
        };
        record("mean_x", sim.mean_x, ref.mean_x);
        record("var_x", sim.var_x, ref.var_x);
        if (sim.sigma_defined) record("sigma", sim.sigma, ref.sigma);
        record("n_total", sim.n_total, ref.n_total);
    }
    return res;
}

}  // namespace telephase

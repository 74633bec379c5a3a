#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "telephase/protocol.hpp"

namespace telephase::test {

inline double rel_err(double a, double b) {
    return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-300});
}

// Interior zeros of mean_x(phi) on (lo, hi), located by sign change plus bisection.
inline std::vector<double> find_mean_x_zeros(const ProtocolParams& base, double lo, double hi,
                                             int n_grid) {
    const auto f = [&](double phi) {
        ProtocolParams p = base;
        p.phi = phi;
        return run_ensemble(p).mean_x;
    };
    std::vector<double> zeros;
    double prev_phi = lo;
    double prev = f(lo);
    for (int i = 1; i <= n_grid; ++i) {
        const double phi = lo + (hi - lo) * i / n_grid;
        const double v = f(phi);
        if ((prev < 0.0 && v > 0.0) || (prev > 0.0 && v < 0.0)) {
            double a = prev_phi, b = phi, fa = prev;
            for (int it = 0; it < 80; ++it) {
                const double mid = 0.5 * (a + b);
                const double fm = f(mid);
                if ((fa < 0.0) == (fm < 0.0)) {
                    a = mid;
                    fa = fm;
                } else {
                    b = mid;
                }
            }
            zeros.push_back(0.5 * (a + b));
        }
        prev_phi = phi;
        prev = v;
    }
    return zeros;
}

}  // namespace telephase::test

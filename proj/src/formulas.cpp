#include "telephase/formulas.hpp"

#include <cmath>

#include "telephase/errors.hpp"

namespace telephase {

namespace {

// sum_{i=0}^{k-1} q^i.  Summed term-by-term near q = 1 where the closed form
// degenerates to 0/0.
double geometric_sum(double q, int k) {
    if (k <= 0) return 0.0;
    if (std::abs(1.0 - q) < 1e-6) {
        double acc = 0.0;
        double term = 1.0;
        for (int i = 0; i < k; ++i) {
            acc += term;
            term *= q;
        }
        return acc;
    }
    return (1.0 - std::pow(q, k)) / (1.0 - q);
}

// sum_{j=0}^{m-1} (m-j) q^j == [m(1-q) - q(1-q^m)] / (1-q)^2.
double weighted_geometric_sum(double q, int m) {
    if (m <= 0) return 0.0;
    if (std::abs(1.0 - q) < 1e-6) {
        double acc = 0.0;
        double term = 1.0;
        for (int j = 0; j < m; ++j) {
            acc += (m - j) * term;
            term *= q;
        }
        return acc;
    }
    const double om = 1.0 - q;
    return (m * om - q * (1.0 - std::pow(q, m))) / (om * om);
}

// eta2 e^{-2r} + (1 + 2 n_th)(1 - eta2): the quadrature noise added per
// teleportation, divided by 1/2.
double noise_bracket(double r, double eta2, double n_th) {
    return eta2 * std::exp(-2.0 * r) + (1.0 + 2.0 * n_th) * (1.0 - eta2);
}

}  // namespace

IdealMoments ideal_moments(double alpha, double phi, double r, int m) {
    if (!std::isfinite(alpha) || alpha < 0.0) {
        throw invalid_parameter_error("alpha must be finite and >= 0");
    }
    if (!std::isfinite(phi)) throw invalid_parameter_error("phi must be finite");
    if (!std::isfinite(r) || r < 0.0) throw invalid_parameter_error("r must be finite and >= 0");
    if (m < 0) throw invalid_parameter_error("m must be >= 0");

    const double eps = std::exp(-2.0 * r);
    IdealMoments out;
    out.mean_x = alpha * std::sin((m + 1) * phi);
    out.var_x = (1.0 + 2.0 * m * eps) / 4.0;
    out.n_m = alpha * alpha + m * eps;
    out.n_total = (m + 1) * alpha * alpha + 0.5 * m * (m + 1) * eps;
    const double denom = 2.0 * (m + 1) * alpha * std::abs(std::cos((m + 1) * phi));
    if (denom == 0.0) {
        throw sensitivity_undefined_error("sensitivity undefined: signal derivative vanishes");
    }
    out.sigma = std::sqrt(1.0 + 2.0 * m * eps) / denom;
    return out;
}

LossyMoments lossy_moments(const ProtocolParams& p) {
    p.validate();
    const double br = noise_bracket(p.r, p.eta2, p.n_th);
    const double amp = p.alpha * std::pow(p.eta1, (p.m + 1) / 2.0);
    const double s2 = 2.0 * p.eta1 * geometric_sum(p.eta1, p.m);  // 2 eta1 (1-eta1^m)/(1-eta1)

    LossyMoments out;
    out.mean_x = amp * std::sin((p.m + 1) * p.phi);
    out.var_x = (1.0 + s2 * br) / 4.0;
    out.n_total = geometric_sum(p.eta1, p.m + 1) * p.alpha * p.alpha +
                  weighted_geometric_sum(p.eta1, p.m) * br;
    const double denom = 2.0 * (p.m + 1) * amp * std::abs(std::cos((p.m + 1) * p.phi));
    if (denom == 0.0) {
        throw sensitivity_undefined_error("sensitivity undefined: signal derivative vanishes");
    }
    out.sigma = std::sqrt(1.0 + s2 * br) / denom;
    return out;
}

double effective_squeezing(double r, double eta2, double n_th) {
    if (!std::isfinite(r) || r < 0.0) throw invalid_parameter_error("r must be finite and >= 0");
    if (!(eta2 >= 0.0 && eta2 <= 1.0)) throw invalid_parameter_error("eta2 must be in [0,1]");
    if (!std::isfinite(n_th) || n_th < 0.0) throw invalid_parameter_error("n_th must be >= 0");
    const double arg = noise_bracket(r, eta2, n_th);
    // arg >= e^{-2r} > 0 for every valid input
    return -0.5 * std::log(arg);
}

double coherent_baseline_sigma(double n_total, double phi, double eta1) {
    if (!std::isfinite(n_total) || n_total <= 0.0) {
        throw invalid_parameter_error("n_total must be > 0");
    }
    if (!(eta1 >= 0.0 && eta1 <= 1.0)) throw invalid_parameter_error("eta1 must be in [0,1]");
    const double denom = 2.0 * std::sqrt(eta1 * n_total) * std::abs(std::cos(phi));
    if (denom == 0.0) {
        throw sensitivity_undefined_error("sensitivity undefined: signal derivative vanishes");
    }
    return 1.0 / denom;
}

}  // namespace telephase

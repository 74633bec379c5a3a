#include "telephase/protocol.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

namespace telephase {

void ProtocolParams::validate() const {
    if (!std::isfinite(alpha) || alpha < 0.0) {
        throw invalid_parameter_error("alpha must be finite and >= 0");
    }
    if (!std::isfinite(phi)) throw invalid_parameter_error("phi must be finite");
    if (!std::isfinite(r) || r < 0.0) throw invalid_parameter_error("r must be finite and >= 0");
    if (m < 0) throw invalid_parameter_error("m must be >= 0");
    if (!std::isfinite(g_x) || g_x <= 0.0) throw invalid_parameter_error("g_x must be > 0");
    if (!std::isfinite(g_p) || g_p <= 0.0) throw invalid_parameter_error("g_p must be > 0");
    if (!(eta1 >= 0.0 && eta1 <= 1.0)) throw invalid_parameter_error("eta1 must be in [0,1]");
    if (!(eta2 >= 0.0 && eta2 <= 1.0)) throw invalid_parameter_error("eta2 must be in [0,1]");
    if (!std::isfinite(n_th) || n_th < 0.0) throw invalid_parameter_error("n_th must be >= 0");
}

namespace {

// Quadrature variance added to the retained mode by one teleportation round:
//   (1+g^2) V_m - 2 g C
// with V_m, C the per-mode variance and cross-covariance of the lossy
// resource, rewritten as
//   eta2 [e^{2r}(1-g)^2 + e^{-2r}(1+g)^2] / 8 + (1-eta2)(1+2 n_th)(1+g^2) / 4
// so that at g = 1 the antisqueezed e^{2r} term cancels exactly instead of
// through a catastrophic cosh - sinh subtraction.
struct TeleportNoise {
    double add_x = 0.0;
    double add_p = 0.0;
};

TeleportNoise teleport_noise(const ProtocolParams& p) {
    const double em = std::exp(-2.0 * p.r);
    const double ep = std::exp(2.0 * p.r);
    const double th = (1.0 - p.eta2) * (1.0 + 2.0 * p.n_th);
    const auto add = [&](double g) {
        return p.eta2 * (ep * (1.0 - g) * (1.0 - g) + em * (1.0 + g) * (1.0 + g)) / 8.0 +
               th * (1.0 + g * g) / 4.0;
    };
    return {add(p.g_x), add(p.g_p)};
}

// Single-mode moment register: mean, its phi-derivative, and the covariance.
struct Core {
    Eigen::Vector2d mean;
    Eigen::Vector2d dmean;
    Eigen::Matrix2d cov;
};

void core_teleport(Core& c, double g_x, double g_p, const TeleportNoise& tn) {
    c.mean(0) *= g_x;
    c.mean(1) *= g_p;
    c.dmean(0) *= g_x;
    c.dmean(1) *= g_p;
    c.cov(0, 0) = g_x * g_x * c.cov(0, 0) + tn.add_x;
    c.cov(1, 1) = g_p * g_p * c.cov(1, 1) + tn.add_p;
    c.cov(0, 1) *= g_x * g_p;
    c.cov(1, 0) = c.cov(0, 1);
}

struct CoreResult {
    Core core;
    std::vector<double> ledger;
    double n_total = 0.0;
    double mean_sq_total = 0.0;  // sum over passes of |mean|^2
};

CoreResult run_core(const ProtocolParams& p) {
    Core c;
    c.mean << 0.0, p.alpha;
    c.dmean.setZero();
    c.cov = Eigen::Matrix2d::Identity() * 0.25;

    const TeleportNoise tn = teleport_noise(p);
    const double co = std::cos(p.phi);
    const double si = std::sin(p.phi);
    Eigen::Matrix2d rot;
    rot << co, si, -si, co;
    Eigen::Matrix2d drot;  // d rot / d phi
    drot << -si, co, -co, -si;
    const double t1 = std::sqrt(p.eta1);
    const double l1 = (1.0 - p.eta1) * 0.25;

    CoreResult res;
    res.ledger.reserve(p.m + 1);
    for (int pass = 0; pass <= p.m; ++pass) {
        res.ledger.push_back(std::max(0.0, c.mean.squaredNorm() + c.cov.trace() - 0.5));
        res.mean_sq_total += c.mean.squaredNorm();

        c.dmean = (rot * c.dmean + drot * c.mean).eval();  // uses the pre-rotation mean
        c.mean = (rot * c.mean).eval();
        c.cov = (rot * c.cov * rot.transpose()).eval();

        c.mean *= t1;
        c.dmean *= t1;
        c.cov *= p.eta1;
        c.cov(0, 0) += l1;
        c.cov(1, 1) += l1;

        if (pass < p.m) core_teleport(c, p.g_x, p.g_p, tn);
    }
    res.core = c;
    res.n_total = std::accumulate(res.ledger.begin(), res.ledger.end(), 0.0);
    return res;
}

}  // namespace

AffineMap teleport_reduction_map(double g_x, double g_p) {
    AffineMap map;
    map.a = Eigen::MatrixXd::Zero(2, 6);
    map.a(0, 0) = g_x;
    map.a(0, 2) = -g_x;
    map.a(0, 4) = 1.0;
    map.a(1, 1) = g_p;
    map.a(1, 3) = g_p;
    map.a(1, 5) = 1.0;
    map.d = Eigen::VectorXd::Zero(2);
    map.noise = Eigen::MatrixXd::Zero(2, 2);
    return map;
}

ProbeWithDerivative teleport_step(const ProbeWithDerivative& probe, const ProtocolParams& p) {
    p.validate();
    if (probe.state.n_modes() != 1) {
        throw invalid_parameter_error("teleport_step expects a single-mode probe");
    }
    Core c;
    c.mean = probe.state.mean;
    c.dmean = probe.dmean_dphi;
    c.cov = probe.state.cov;
    core_teleport(c, p.g_x, p.g_p, teleport_noise(p));

    ProbeWithDerivative out;
    out.state.mean = c.mean;
    out.state.cov = c.cov;
    out.dmean_dphi = c.dmean;
    return out;
}

ProtocolMoments run_ensemble(const ProtocolParams& p) {
    p.validate();
    CoreResult cr = run_core(p);

    ProtocolMoments out;
    out.mean_x = cr.core.mean(0);
    out.mean_p = cr.core.mean(1);
    out.var_x = cr.core.cov(0, 0);
    out.var_p = cr.core.cov(1, 1);
    out.dmeanx_dphi = cr.core.dmean(0);
    out.per_pass_photons = std::move(cr.ledger);
    out.n_total = cr.n_total;
    if (out.dmeanx_dphi != 0.0) {
        out.sigma_defined = true;
        out.sigma = std::sqrt(out.var_x) / std::abs(out.dmeanx_dphi);
    }
    return out;
}

std::pair<double, double> photon_budget_coefficients(const ProtocolParams& p) {
    ProtocolParams q = p;
    q.alpha = 0.0;
    q.validate();
    const double b = run_core(q).n_total;
    // Means at alpha = 0 vanish identically, so the quadratic coefficient is
    // the summed squared means of the unit-amplitude run.  Reading it off
    // directly instead of differencing the two photon totals keeps A exact
    // even when amplifying gains make B astronomically large.
    q.alpha = 1.0;
    const double a = run_core(q).mean_sq_total;
    if (!(a > 0.0)) {
        throw std::logic_error("photon budget coefficient A must be positive");
    }
    return {a, b};
}

}  // namespace telephase

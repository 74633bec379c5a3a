#pragma once

#include <limits>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "telephase/gaussian.hpp"

namespace telephase {

struct ProtocolParams {
    double alpha = 1.0;  // probe amplitude, ⟨p⟩ of the initial coherent state
    double phi = 0.0;    // unknown phase per pass
    double r = 1.0;      // squeezing parameter of the teleportation resource
    int m = 0;           // number of teleportations (phase is applied m+1 times)
    double g_x = 1.0;    // feedback gains
    double g_p = 1.0;
    double eta1 = 1.0;   // transmission of the phase-shift arm, applied after every pass
    double eta2 = 1.0;   // per-mode transmission of the teleportation resource
    double n_th = 0.0;   // thermal photons mixed in at the eta2 beamsplitters

    void validate() const;  // throws invalid_parameter_error naming the offending field
};

struct ProtocolMoments {
    double mean_x = 0.0;
    double mean_p = 0.0;
    double var_x = 0.0;
    double var_p = 0.0;
    double dmeanx_dphi = 0.0;              // exact derivative, co-propagated
    std::vector<double> per_pass_photons;  // ⟨n⟩ entering each phase pass
    double n_total = 0.0;                  // sum of the ledger
    double sigma = std::numeric_limits<double>::quiet_NaN();
    bool sigma_defined = false;            // false when dmeanx_dphi == 0
};

struct ProbeWithDerivative {
    GaussianState state;  // single mode
    Eigen::Vector2d dmean_dphi = Eigen::Vector2d::Zero();
};

// 3-mode -> 1-mode reduction implementing measure-and-feed-forward in the
// ensemble average:  x_out = x3 + g_x (x1 - x2),  p_out = p3 + g_p (p1 + p2).
// Satisfies A Ω₃ Aᵀ = Ω₁ for every gain pair.
AffineMap teleport_reduction_map(double g_x, double g_p);

// One teleportation round: attach a lossy two-mode squeezed vacuum and apply
// the reduction above to state, mean derivative included.
ProbeWithDerivative teleport_step(const ProbeWithDerivative& probe, const ProtocolParams& p);

// Full pipeline: probe -> [ledger entry -> phase -> eta1 loss -> teleport]
// with m+1 phase passes and m teleportations, then readout moments.
ProtocolMoments run_ensemble(const ProtocolParams& p);

// (A, B) with n_total(alpha) = A alpha^2 + B exactly; alpha in `p` is ignored.
std::pair<double, double> photon_budget_coefficients(const ProtocolParams& p);

}  // namespace telephase

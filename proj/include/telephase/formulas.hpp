#pragma once

#include "telephase/protocol.hpp"

namespace telephase {

// Closed-form moments for unit feedback gains.  These are the analytic
// counterparts of run_ensemble and serve as its oracle.

struct IdealMoments {
    double mean_x = 0.0;   // alpha sin((m+1) phi)
    double var_x = 0.0;    // (1 + 2 m e^{-2r}) / 4
    double sigma = 0.0;    // sqrt(var)/|d mean/d phi|
    double n_m = 0.0;      // alpha^2 + m e^{-2r}
    double n_total = 0.0;  // (m+1) alpha^2 + m(m+1) e^{-2r} / 2
};

struct LossyMoments {
    double mean_x = 0.0;   // alpha eta1^{(m+1)/2} sin((m+1) phi)
    double var_x = 0.0;
    double sigma = 0.0;
    double n_total = 0.0;
};

IdealMoments ideal_moments(double alpha, double phi, double r, int m);

// Lossless limits eta1 -> 1, eta2 -> 1 are evaluated analytically (explicit
// geometric sums near eta1 = 1, no 0/0).  Assumes unit gains; the gain fields
// of `p` are ignored.
LossyMoments lossy_moments(const ProtocolParams& p);

// r_lim = -ln(eta2 e^{-2r} + (1 + 2 n_th)(1 - eta2)) / 2: the squeezing that
// reproduces, at eta2 = 1, the sensitivity and photon totals of a lossy resource.
double effective_squeezing(double r, double eta2, double n_th = 0.0);

// sigma_coh = 1 / (2 sqrt(eta1 n_total) |cos(phi)|).
double coherent_baseline_sigma(double n_total, double phi, double eta1 = 1.0);

}  // namespace telephase

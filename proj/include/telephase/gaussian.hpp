#pragma once

#include <Eigen/Dense>
#include <utility>

#include "telephase/errors.hpp"

namespace telephase {

// Quadrature convention used throughout the library:
//   x = (a + a†)/2,  p = (a - a†)/(2i)
// so the vacuum has Var(x) = Var(p) = 1/4 and a mode's mean photon number is
// ⟨x⟩² + ⟨p⟩² + Var(x) + Var(p) - 1/2.  Phase-space vectors are ordered
// (x1, p1, x2, p2, ...).  Physical covariance matrices have all symplectic
// eigenvalues >= 1/4.

enum class Quadrature { X, P };

struct GaussianState {
    Eigen::VectorXd mean;  // length 2*n_modes
    Eigen::MatrixXd cov;   // 2*n_modes x 2*n_modes, symmetric

    int n_modes() const { return static_cast<int>(mean.size()) / 2; }

    static GaussianState vacuum(int n_modes);
};

// Affine Gaussian channel.  Moments transform as
//   mean -> a * mean + d,   cov -> a * cov * aᵀ + noise.
// Composition: (this, then outer) = (outer.a*a, outer.a*d + outer.d,
//                                    outer.a*noise*outer.aᵀ + outer.noise).
struct AffineMap {
    Eigen::MatrixXd a;
    Eigen::VectorXd d;
    Eigen::MatrixXd noise;

    GaussianState apply(const GaussianState& s) const;
    AffineMap then(const AffineMap& outer) const;
    static AffineMap identity(int n_modes);
};

// Coherent probe with ⟨p⟩ = alpha, ⟨x⟩ = 0.
GaussianState make_coherent(double alpha);

// Two-mode squeezed vacuum with Var(x2 - x3) = Var(p2 + p3) = e^{-2r}/2.
// Gauge fixed to x-correlated / p-anticorrelated.
GaussianState make_tmsv(double r);

GaussianState tensor(const GaussianState& a, const GaussianState& b);

// x -> x cos(phi) + p sin(phi), p -> p cos(phi) - x sin(phi) on one mode.
GaussianState phase_rotate(const GaussianState& s, int mode, double phi);

// x_i' = (x_i + x_j)/sqrt(2), x_j' = (x_i - x_j)/sqrt(2), same for p.
GaussianState balanced_bs(const GaussianState& s, int mode_i, int mode_j);

// Transmission eta with the reflected port replaced by a thermal state of
// mean photon number n_th (vacuum when n_th = 0).
GaussianState loss_channel(const GaussianState& s, int mode, double eta, double n_th = 0.0);

double mean_photons(const GaussianState& s, int mode);

// (mean, variance) of a single quadrature.
std::pair<double, double> quadrature_marginal(const GaussianState& s, int mode, Quadrature q);

struct HomodyneOutcome {
    GaussianState remaining;  // measured mode removed
    double marginal_mean = 0.0;
    double marginal_var = 0.0;
};

// Condition on quadrature q of `mode` taking the given outcome.  The remaining
// modes get the Schur-complement update; the measured mode (including its
// conjugate quadrature) is traced out.
HomodyneOutcome homodyne_condition(const GaussianState& s, int mode, Quadrature q,
                                   double outcome);

// The affine maps behind the operations above, exposed so their symplectic
// structure can be checked directly.
AffineMap rotation_map(int n_modes, int mode, double phi);
AffineMap beamsplitter_map(int n_modes, int mode_i, int mode_j);
AffineMap loss_map(int n_modes, int mode, double eta, double n_th = 0.0);

// Block-diagonal symplectic form with [[0,1],[-1,0]] per mode.
Eigen::MatrixXd symplectic_form(int n_modes);

// Smallest modulus among the eigenvalues of Omega * cov; >= 1/4 for physical states.
double min_symplectic_eigenvalue(const Eigen::MatrixXd& cov);

bool is_physical(const GaussianState& s, double slack = 1e-12);

}  // namespace telephase

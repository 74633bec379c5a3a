#include "telephase/gaussian.hpp"

#include <cmath>
#include <vector>

namespace telephase {

namespace {

void check_mode(const GaussianState& s, int mode) {
    if (mode < 0 || mode >= s.n_modes()) {
        throw invalid_parameter_error("mode index out of range");
    }
}

}  // namespace

GaussianState GaussianState::vacuum(int n_modes) {
    if (n_modes < 1) throw invalid_parameter_error("n_modes must be >= 1");
    GaussianState s;
    s.mean = Eigen::VectorXd::Zero(2 * n_modes);
    s.cov = Eigen::MatrixXd::Identity(2 * n_modes, 2 * n_modes) * 0.25;
    return s;
}

GaussianState AffineMap::apply(const GaussianState& s) const {
    GaussianState out;
    out.mean = a * s.mean + d;
    out.cov = a * s.cov * a.transpose() + noise;
    return out;
}

AffineMap AffineMap::then(const AffineMap& outer) const {
    AffineMap out;
    out.a = outer.a * a;
    out.d = outer.a * d + outer.d;
    out.noise = outer.a * noise * outer.a.transpose() + outer.noise;
    return out;
}

AffineMap AffineMap::identity(int n_modes) {
    const int k = 2 * n_modes;
    return {Eigen::MatrixXd::Identity(k, k), Eigen::VectorXd::Zero(k),
            Eigen::MatrixXd::Zero(k, k)};
}

GaussianState make_coherent(double alpha) {
    if (!std::isfinite(alpha) || alpha < 0.0) {
        throw invalid_parameter_error("alpha must be finite and >= 0");
    }
    GaussianState s = GaussianState::vacuum(1);
    s.mean(1) = alpha;  // ⟨p⟩ = alpha
    return s;
}

GaussianState make_tmsv(double r) {
    if (!std::isfinite(r) || r < 0.0) {
        throw invalid_parameter_error("r must be finite and >= 0");
    }
    GaussianState s = GaussianState::vacuum(2);
    const double ch = std::cosh(2.0 * r) / 4.0;
    const double sh = std::sinh(2.0 * r) / 4.0;
    s.cov.diagonal().setConstant(ch);
    s.cov(0, 2) = s.cov(2, 0) = sh;   // x correlated
    s.cov(1, 3) = s.cov(3, 1) = -sh;  // p anticorrelated
    return s;
}

GaussianState tensor(const GaussianState& a, const GaussianState& b) {
    const auto na = a.mean.size();
    const auto nb = b.mean.size();
    GaussianState out;
    out.mean.resize(na + nb);
    out.mean.head(na) = a.mean;
    out.mean.tail(nb) = b.mean;
    out.cov = Eigen::MatrixXd::Zero(na + nb, na + nb);
    out.cov.topLeftCorner(na, na) = a.cov;
    out.cov.bottomRightCorner(nb, nb) = b.cov;
    return out;
}

AffineMap rotation_map(int n_modes, int mode, double phi) {
    AffineMap map = AffineMap::identity(n_modes);
    const double c = std::cos(phi);
    const double s = std::sin(phi);
    const int k = 2 * mode;
    map.a(k, k) = c;
    map.a(k, k + 1) = s;
    map.a(k + 1, k) = -s;
    map.a(k + 1, k + 1) = c;
    return map;
}

AffineMap beamsplitter_map(int n_modes, int mode_i, int mode_j) {
    AffineMap map = AffineMap::identity(n_modes);
    const double h = 1.0 / std::sqrt(2.0);
    for (int q = 0; q < 2; ++q) {
        const int a_ = 2 * mode_i + q;
        const int b_ = 2 * mode_j + q;
        map.a(a_, a_) = h;
        map.a(a_, b_) = h;
        map.a(b_, a_) = h;
        map.a(b_, b_) = -h;
    }
    return map;
}

AffineMap loss_map(int n_modes, int mode, double eta, double n_th) {
    AffineMap map = AffineMap::identity(n_modes);
    const int k = 2 * mode;
    const double t = std::sqrt(eta);
    map.a(k, k) = t;
    map.a(k + 1, k + 1) = t;
    const double add = (1.0 - eta) * (1.0 + 2.0 * n_th) / 4.0;
    map.noise(k, k) = add;
    map.noise(k + 1, k + 1) = add;
    return map;
}

GaussianState phase_rotate(const GaussianState& s, int mode, double phi) {
    check_mode(s, mode);
    return rotation_map(s.n_modes(), mode, phi).apply(s);
}

GaussianState balanced_bs(const GaussianState& s, int mode_i, int mode_j) {
    check_mode(s, mode_i);
    check_mode(s, mode_j);
    if (mode_i == mode_j) throw invalid_parameter_error("beamsplitter modes must differ");
    return beamsplitter_map(s.n_modes(), mode_i, mode_j).apply(s);
}

GaussianState loss_channel(const GaussianState& s, int mode, double eta, double n_th) {
    check_mode(s, mode);
    if (!(eta >= 0.0 && eta <= 1.0)) throw invalid_parameter_error("eta must be in [0,1]");
    if (!std::isfinite(n_th) || n_th < 0.0) throw invalid_parameter_error("n_th must be >= 0");
    return loss_map(s.n_modes(), mode, eta, n_th).apply(s);
}

double mean_photons(const GaussianState& s, int mode) {
    check_mode(s, mode);
    const int k = 2 * mode;
    const double v = s.mean(k) * s.mean(k) + s.mean(k + 1) * s.mean(k + 1) +
                     s.cov(k, k) + s.cov(k + 1, k + 1) - 0.5;
    return std::max(0.0, v);
}

std::pair<double, double> quadrature_marginal(const GaussianState& s, int mode, Quadrature q) {
    check_mode(s, mode);
    const int idx = 2 * mode + (q == Quadrature::P ? 1 : 0);
    return {s.mean(idx), s.cov(idx, idx)};
}

HomodyneOutcome homodyne_condition(const GaussianState& s, int mode, Quadrature q,
                                   double outcome) {
    check_mode(s, mode);
    const int idx = 2 * mode + (q == Quadrature::P ? 1 : 0);
    const double var = s.cov(idx, idx);
    if (!(var > 0.0)) {
        throw degenerate_measurement_error("homodyne marginal variance must be positive");
    }

    std::vector<int> keep;
    keep.reserve(s.mean.size() - 2);
    for (int t = 0; t < s.mean.size(); ++t) {
        if (t != 2 * mode && t != 2 * mode + 1) keep.push_back(t);
    }
    const int nk = static_cast<int>(keep.size());

    Eigen::VectorXd mean_k(nk);
    Eigen::VectorXd cross(nk);  // cov(keep, idx)
    Eigen::MatrixXd cov_k(nk, nk);
    for (int i = 0; i < nk; ++i) {
        mean_k(i) = s.mean(keep[i]);
        cross(i) = s.cov(keep[i], idx);
        for (int j = 0; j < nk; ++j) cov_k(i, j) = s.cov(keep[i], keep[j]);
    }

    HomodyneOutcome out;
    out.marginal_mean = s.mean(idx);
    out.marginal_var = var;
    out.remaining.mean = mean_k + cross * ((outcome - s.mean(idx)) / var);
    out.remaining.cov = cov_k - cross * cross.transpose() / var;
    return out;
}

Eigen::MatrixXd symplectic_form(int n_modes) {
    Eigen::MatrixXd omega = Eigen::MatrixXd::Zero(2 * n_modes, 2 * n_modes);
    for (int k = 0; k < n_modes; ++k) {
        omega(2 * k, 2 * k + 1) = 1.0;
        omega(2 * k + 1, 2 * k) = -1.0;
    }
    return omega;
}

double min_symplectic_eigenvalue(const Eigen::MatrixXd& cov) {
    const int n = static_cast<int>(cov.rows()) / 2;
    Eigen::EigenSolver<Eigen::MatrixXd> es(symplectic_form(n) * cov, false);
    return es.eigenvalues().cwiseAbs().minCoeff();
}

bool is_physical(const GaussianState& s, double slack) {
    if (!s.mean.allFinite() || !s.cov.allFinite()) return false;
    if ((s.cov - s.cov.transpose()).cwiseAbs().maxCoeff() > 1e-12) return false;
    return min_symplectic_eigenvalue(s.cov) >= 0.25 - slack;
}

}  // namespace telephase

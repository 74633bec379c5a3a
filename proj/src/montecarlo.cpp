#include "telephase/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>
#include <utility>

namespace telephase {

TrajectoryResult sample_trajectory(const ProtocolParams& p, RandomStream& rng) {
    p.validate();
    const double sqrt2 = std::sqrt(2.0);

    GaussianState probe = make_coherent(p.alpha);
    TrajectoryResult out;
    out.per_pass_photons.reserve(p.m + 1);

    for (int pass = 0; pass <= p.m; ++pass) {
        out.per_pass_photons.push_back(mean_photons(probe, 0));
        probe = phase_rotate(probe, 0, p.phi);
        probe = loss_channel(probe, 0, p.eta1);
        if (pass == p.m) break;

        GaussianState tm = make_tmsv(p.r);
        tm = loss_channel(tm, 0, p.eta2, p.n_th);
        tm = loss_channel(tm, 1, p.eta2, p.n_th);

        // register: 0 = probe, 1 = resource mode kept for measurement,
        // 2 = resource mode that becomes the new probe
        GaussianState reg = balanced_bs(tensor(probe, tm), 0, 1);

        const auto [pm, pv] = quadrature_marginal(reg, 0, Quadrature::P);
        const double p1 = rng.next_normal(pm, std::sqrt(pv));
        reg = homodyne_condition(reg, 0, Quadrature::P, p1).remaining;

        const auto [xm, xv] = quadrature_marginal(reg, 0, Quadrature::X);
        const double x2 = rng.next_normal(xm, std::sqrt(xv));
        reg = homodyne_condition(reg, 0, Quadrature::X, x2).remaining;

        reg.mean(0) += p.g_x * sqrt2 * x2;
        reg.mean(1) += p.g_p * sqrt2 * p1;
        probe = std::move(reg);
    }

    const auto [fm, fv] = quadrature_marginal(probe, 0, Quadrature::X);
    out.final_x = rng.next_normal(fm, std::sqrt(fv));
    return out;
}

namespace {

// Running central moments up to fourth order (Pebay update/merge formulas).
struct Moments {
    double n = 0.0;
    double mean = 0.0;
    double m2 = 0.0;
    double m3 = 0.0;
    double m4 = 0.0;

    void add(double x) {
        const double n1 = n;
        n += 1.0;
        const double delta = x - mean;
        const double dn = delta / n;
        const double dn2 = dn * dn;
        const double t1 = delta * dn * n1;
        mean += dn;
        m4 += t1 * dn2 * (n * n - 3.0 * n + 3.0) + 6.0 * dn2 * m2 - 4.0 * dn * m3;
        m3 += t1 * dn * (n - 2.0) - 3.0 * dn * m2;
        m2 += t1;
    }

    void merge(const Moments& b) {
        if (b.n == 0.0) return;
        if (n == 0.0) {
            *this = b;
            return;
        }
        const double na = n;
        const double nb = b.n;
        const double nt = na + nb;
        const double d = b.mean - mean;
        const double d2 = d * d;
        const double m4n = m4 + b.m4 +
                           d2 * d2 * na * nb * (na * na - na * nb + nb * nb) / (nt * nt * nt) +
                           6.0 * d2 * (na * na * b.m2 + nb * nb * m2) / (nt * nt) +
                           4.0 * d * (na * b.m3 - nb * m3) / nt;
        const double m3n = m3 + b.m3 + d2 * d * na * nb * (na - nb) / (nt * nt) +
                           3.0 * d * (na * b.m2 - nb * m2) / nt;
        const double m2n = m2 + b.m2 + d2 * na * nb / nt;
        mean += d * nb / nt;
        m2 = m2n;
        m3 = m3n;
        m4 = m4n;
        n = nt;
    }
};

struct LedgerAcc {
    std::vector<double> sum;
    std::vector<double> sumsq;

    explicit LedgerAcc(std::size_t k = 0) : sum(k, 0.0), sumsq(k, 0.0) {}

    void add(const std::vector<double>& v) {
        for (std::size_t i = 0; i < v.size(); ++i) {
            sum[i] += v[i];
            sumsq[i] += v[i] * v[i];
        }
    }

    void merge(const LedgerAcc& b) {
        for (std::size_t i = 0; i < sum.size(); ++i) {
            sum[i] += b.sum[i];
            sumsq[i] += b.sumsq[i];
        }
    }
};

}  // namespace

EnsembleEstimate estimate(const ProtocolParams& p, long n_traj, std::uint64_t seed,
                          int workers) {
    p.validate();
    if (n_traj < 2) throw invalid_parameter_error("n_traj must be >= 2");
    if (workers < 1) throw invalid_parameter_error("workers must be >= 1");

    // Fixed chunking, merged in chunk order: the reduction is identical for
    // every worker count.
    const long chunk = 8192;
    const long n_chunks = (n_traj + chunk - 1) / chunk;
    std::vector<Moments> mom(n_chunks);
    std::vector<LedgerAcc> led(n_chunks, LedgerAcc(p.m + 1));

    const auto run_chunk = [&](long ci) {
        Moments mo;
        LedgerAcc la(p.m + 1);
        const long hi = std::min(n_traj, (ci + 1) * chunk);
        for (long i = ci * chunk; i < hi; ++i) {
            RandomStream rs = RandomStream::substream(seed, static_cast<std::uint64_t>(i));
            const TrajectoryResult tr = sample_trajectory(p, rs);
            mo.add(tr.final_x);
            la.add(tr.per_pass_photons);
        }
        mom[ci] = mo;
        led[ci] = std::move(la);
    };

    if (workers == 1 || n_chunks == 1) {
        for (long ci = 0; ci < n_chunks; ++ci) run_chunk(ci);
    } else {
        std::atomic<long> next{0};
        std::vector<std::thread> pool;
        const int nw = std::min<long>(workers, n_chunks);
        pool.reserve(nw);
        for (int w = 0; w < nw; ++w) {
            pool.emplace_back([&] {
                for (long ci = next.fetch_add(1); ci < n_chunks; ci = next.fetch_add(1)) {
                    run_chunk(ci);
                }
            });
        }
        for (auto& t : pool) t.join();
    }

    Moments total;
    LedgerAcc ledger(p.m + 1);
    for (long ci = 0; ci < n_chunks; ++ci) {
        total.merge(mom[ci]);
        ledger.merge(led[ci]);
    }

    EnsembleEstimate out;
    out.n_traj = n_traj;
    out.seed = seed;
    const double n = total.n;
    out.mean_x_hat = total.mean;
    const double s2 = total.m2 / (n - 1.0);
    out.var_x_hat = s2;
    out.stderr_mean = std::sqrt(s2 / n);
    const double m4 = total.m4 / n;
    const double var_of_var = (m4 - s2 * s2 * (n - 3.0) / (n - 1.0)) / n;
    out.stderr_var = std::sqrt(std::max(0.0, var_of_var));

    out.ledger_mean.resize(p.m + 1);
    out.ledger_stderr.resize(p.m + 1);
    for (int i = 0; i <= p.m; ++i) {
        const double mu = ledger.sum[i] / n;
        const double v = std::max(0.0, (ledger.sumsq[i] - ledger.sum[i] * ledger.sum[i] / n)) /
                         (n - 1.0);
        out.ledger_mean[i] = mu;
        out.ledger_stderr[i] = std::sqrt(v / n);
    }
    return out;
}

}  // namespace telephase

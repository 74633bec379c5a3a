#pragma once

#include <cstdint>
#include <vector>

#include "telephase/protocol.hpp"
#include "telephase/rng.hpp"

namespace telephase {

// Single-shot oracle for the ensemble simulator: homodyne outcomes are sampled
// explicitly, the conditional Gaussian state is tracked, and the feedback
// displacement uses the sampled outcomes.

struct TrajectoryResult {
    double final_x = 0.0;
    std::vector<double> per_pass_photons;  // conditional ⟨n⟩ entering each pass
};

struct EnsembleEstimate {
    double mean_x_hat = 0.0;
    double var_x_hat = 0.0;
    double stderr_mean = 0.0;
    double stderr_var = 0.0;  // via the fourth-moment formula
    long n_traj = 0;
    std::uint64_t seed = 0;
    std::vector<double> ledger_mean;
    std::vector<double> ledger_stderr;
};

// Within a round, p'_1 is sampled and conditioned before x'_2.
TrajectoryResult sample_trajectory(const ProtocolParams& p, RandomStream& rng);

// Trajectory i always uses RandomStream::substream(seed, i); results are
// bit-identical for any worker count.
EnsembleEstimate estimate(const ProtocolParams& p, long n_traj, std::uint64_t seed,
                          int workers = 1);

}  // namespace telephase

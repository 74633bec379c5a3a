#pragma once

#include <cstdint>
#include <string>

#include "telephase/protocol.hpp"

namespace telephase {

struct VerifyResult {
    int n_points = 0;
    double max_rel_err = 0.0;
    std::string worst_field;
    ProtocolParams worst_params;
};

// Compares run_ensemble against the closed-form moments at unit gains on a
// seeded random parameter grid (alpha in [0,3], phi in [-1,1], r in [0,3],
// m in [0,50], eta1/eta2 in [0.3,1], n_th in [0,0.1]).  With corrupt_check the
// reference values are deliberately perturbed so the comparison must fail;
// this is the negative control for the check itself.
VerifyResult verify_oracle_grid(int n_points, std::uint64_t seed, bool corrupt_check = false);

}  // namespace telephase

#pragma once

#include <cstdint>
#include <vector>

#include "lforge/denoise.hpp"
#include "lforge/graph_core.hpp"

namespace lforge {

enum class AltMinInit {
    RandomSubset,   ///< uniformly random K-subset of candidate edges (seeded)
    NoisySorting,   ///< rank-ordering on the raw noisy signals
};

struct AltMinConfig {
    int k = 1;
    double gamma = 1.0;
    int max_iter = 50;
    std::uint64_t seed = 0;
    AltMinInit init = AltMinInit::RandomSubset;
    RegularizationConfig reg;  ///< solver options; reg.gamma is ignored, gamma above wins
};

enum class AltMinStop {
    FixedPoint,    ///< w-update reproduced the current selection
    Cycle,         ///< a previously seen selection recurred (exact cost ties)
    IterationCap,
};

struct AltMinTrace {
    /// Joint objective after every half-step: two entries per outer iteration,
    /// first after the X-update, then after the w-update. Non-increasing.
    std::vector<double> objectives;
    int iterations_run = 0;
    bool converged = false;
    AltMinStop stop = AltMinStop::IterationCap;
};

struct AltMinResult {
    EdgeSelection selection;
    SignalMatrix denoised;
    AltMinTrace trace;
    double objective;  ///< joint objective of the returned pair
};

/// Alternate closed-form denoising (X given w) with rank-ordering edge
/// selection (w given X) until the selection reaches a fixed point, a cycle,
/// or max_iter. Returns the best-objective iterate encountered.
AltMinResult alt_min(const SignalMatrix& y, const AltMinConfig& config);

}  // namespace lforge

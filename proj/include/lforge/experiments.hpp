#pragma once

#include <cstdint>
#include <functional>

#include "lforge/altmin.hpp"
#include "lforge/graph_core.hpp"
#include "lforge/relax.hpp"

namespace lforge {

struct SynthConfig {
    int n = 20;
    int k_true = 40;
    int l = 50;          ///< snapshot count
    double alpha = 10.0; ///< smoothing strength of the synthesis filter
    double sigma = 0.5;  ///< noise standard deviation
    std::uint64_t seed = 0;
};

/// Uniformly random k_true-subset of the candidate edges, seeded.
EdgeSelection plant_graph(const SynthConfig& config);

/// X = [I + alpha * L(w_true)]^{-1} Z with Z standard Gaussian n x l, seeded
/// from config. Smooth on the planted graph by construction.
SignalMatrix generate_smooth_signals(const EdgeSelection& w_true, const SynthConfig& config);

/// Y = X + sigma * G with i.i.d. standard Gaussian G, seeded.
SignalMatrix add_noise(const SignalMatrix& x, double sigma, std::uint64_t seed);

struct EvalReport {
    double mse = 0.0;  ///< ||X_hat - X||_F^2 / (N * L)
    double edge_precision = 0.0;
    double edge_recall = 0.0;
    double edge_f1 = 0.0;  ///< harmonic mean, 0 when precision + recall = 0
    double smoothness = 0.0;  ///< (1/L) tr{X_hat^T L(w_hat) X_hat}
    int trials = 1;
};

EvalReport evaluate(const EdgeSelection& w_hat, const SignalMatrix& x_hat,
                    const EdgeSelection& w_true, const SignalMatrix& x_true);

enum class LearnerId {
    NoiselessSorting,  ///< rank-ordering directly on the noisy training signals
    AltMin,
    Relax,
};

struct MonteCarloConfig {
    SynthConfig synth;  ///< synth.l is the training split size, synth.seed the master seed
    int l_eval = 50;    ///< held-out snapshots used for MSE
    int trials = 100;
    int jobs = 1;
    double gamma = 1.0;  ///< smoothness weight for learning and evaluation-time denoising
    int altmin_max_iter = 50;
    RelaxConfig relax;  ///< k, gamma, and reg are overridden per trial
};

struct TrialResult {
    EvalReport report;
    double raw_mse = 0.0;  ///< MSE of the noisy evaluation split itself
};

/// One seeded trial: plant a graph, synthesize train+eval snapshots, learn on
/// the noisy training split, denoise the held-out split, score against truth.
TrialResult run_trial(LearnerId method, const MonteCarloConfig& config, int trial_index);

struct MetricStats {
    double mean = 0.0;
    double std_error = 0.0;
};

struct MonteCarloReport {
    MetricStats mse;
    MetricStats edge_precision;
    MetricStats edge_recall;
    MetricStats edge_f1;
    MetricStats smoothness;
    MetricStats raw_mse;
    int trials = 0;
};

/// Independent seeded trials, optionally on a worker pool. Aggregation is
/// order-independent (per-trial results land in fixed slots, reduced with
/// compensated summation), so jobs does not affect the result. A failed trial
/// aborts the whole run with its index and seed in the error message.
MonteCarloReport monte_carlo(LearnerId method, const MonteCarloConfig& config,
                             const std::function<void(int, int)>& progress = {});

}  // namespace lforge

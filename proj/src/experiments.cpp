#include "lforge/experiments.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <mutex>
#include <string>
#include <thread>
#include <vector>

#include "lforge/errors.hpp"
#include "lforge/noiseless.hpp"
#include "lforge/rng.hpp"

namespace lforge {

namespace {

// Per-purpose RNG stream tags, mixed into the config seed so the ops stay
// pure functions of (inputs, seed) without sharing an engine.
constexpr std::uint64_t kStreamPlant = 1;
constexpr std::uint64_t kStreamSignal = 2;
constexpr std::uint64_t kStreamNoise = 3;
constexpr std::uint64_t kStreamAltMinInit = 4;

void check_synth(const SynthConfig& config) {
    if (config.n < 2) {
        throw DomainError("synth: need at least 2 nodes");
    }
    const long long m_total = static_cast<long long>(config.n) * (config.n - 1) / 2;
    if (config.k_true < 1 || config.k_true > m_total) {
        throw DomainError("synth: k_true = " + std::to_string(config.k_true) +
                          " out of range for M = " + std::to_string(m_total));
    }
    if (config.l < 1) {
        throw DomainError("synth: need at least one snapshot");
    }
    if (!(config.alpha > 0.0) || !std::isfinite(config.alpha)) {
        throw DomainError("synth: alpha must be positive");
    }
    if (!(config.sigma >= 0.0) || !std::isfinite(config.sigma)) {
        throw DomainError("synth: sigma must be nonnegative");
    }
}

// Neumaier-compensated accumulator; reduction order is fixed by trial index.
struct Kahan {
    double sum = 0.0;
    double comp = 0.0;
    void add(double v) {
        const double t = sum + v;
        if (std::abs(sum) >= std::abs(v)) {
            comp += (sum - t) + v;
        } else {
            comp += (v - t) + sum;
        }
        sum = t;
    }
    double value() const { return sum + comp; }
};

MetricStats reduce(const std::vector<double>& values) {
    const int n = static_cast<int>(values.size());
    Kahan acc;
    for (const double v : values) {
        acc.add(v);
    }
    const double mean = acc.value() / static_cast<double>(n);
    if (n < 2) {
        return MetricStats{mean, 0.0};
    }
    Kahan sq;
    for (const double v : values) {
        sq.add((v - mean) * (v - mean));
    }
    const double variance = sq.value() / static_cast<double>(n - 1);
    return MetricStats{mean, std::sqrt(std::max(0.0, variance) / static_cast<double>(n))};
}

}  // namespace

EdgeSelection plant_graph(const SynthConfig& config) {
    check_synth(config);
    const CandidateGraph graph(config.n);
    Rng rng(derive_seed(config.seed, kStreamPlant));
    return EdgeSelection::from_indices(rng.sample_subset(graph.edge_count(), config.k_true),
                                       graph.edge_count());
}

SignalMatrix generate_smooth_signals(const EdgeSelection& w_true, const SynthConfig& config) {
    check_synth(config);
    const CandidateGraph graph(config.n);
    if (w_true.size() != graph.edge_count()) {
        throw DomainError("generate_smooth_signals: selection does not match n");
    }
    Rng rng(derive_seed(config.seed, kStreamSignal));
    SignalMatrix z(config.n, config.l);
    for (int j = 0; j < config.l; ++j) {
        for (int i = 0; i < config.n; ++i) {
            z(i, j) = rng.normal();
        }
    }
    RegularizationConfig reg;
    reg.gamma = config.alpha;
    return tikhonov_denoise(z, assemble_laplacian(w_true, graph), reg);
}

SignalMatrix add_noise(const SignalMatrix& x, double sigma, std::uint64_t seed) {
    validate_signal(x);
    if (!(sigma >= 0.0) || !std::isfinite(sigma)) {
        throw DomainError("add_noise: sigma must be nonnegative");
    }
    if (sigma == 0.0) {
        return x;
    }
    Rng rng(derive_seed(seed, kStreamNoise));
    SignalMatrix y = x;
    for (Eigen::Index j = 0; j < y.cols(); ++j) {
        for (Eigen::Index i = 0; i < y.rows(); ++i) {
            y(i, j) += sigma * rng.normal();
        }
    }
    return y;
}

EvalReport evaluate(const EdgeSelection& w_hat, const SignalMatrix& x_hat,
                    const EdgeSelection& w_true, const SignalMatrix& x_true) {
    if (x_hat.rows() != x_true.rows() || x_hat.cols() != x_true.cols()) {
        throw DomainError("evaluate: estimate and truth shapes differ");
    }
    if (w_hat.size() != w_true.size()) {
        throw DomainError("evaluate: selections live on different candidate sets");
    }
    validate_signal(x_hat);
    validate_signal(x_true);
    const CandidateGraph graph(static_cast<int>(x_hat.rows()));
    if (w_hat.size() != graph.edge_count()) {
        throw DomainError("evaluate: selection does not match signal dimension");
    }

    EvalReport report;
    const double cells = static_cast<double>(x_hat.rows()) * static_cast<double>(x_hat.cols());
    report.mse = (x_hat - x_true).squaredNorm() / cells;

    const std::vector<int> est = w_hat.selected_indices();
    const std::vector<int> truth = w_true.selected_indices();
    std::vector<int> common;
    std::set_intersection(est.begin(), est.end(), truth.begin(), truth.end(),
                          std::back_inserter(common));
    const double tp = static_cast<double>(common.size());
    report.edge_precision = est.empty() ? 0.0 : tp / static_cast<double>(est.size());
    report.edge_recall = truth.empty() ? 0.0 : tp / static_cast<double>(truth.size());
    const double pr = report.edge_precision + report.edge_recall;
    report.edge_f1 = pr == 0.0 ? 0.0 : 2.0 * report.edge_precision * report.edge_recall / pr;

    report.smoothness = laplacian_quadratic(assemble_laplacian(w_hat, graph), x_hat) /
                        static_cast<double>(x_hat.cols());
    report.trials = 1;
    return report;
}

TrialResult run_trial(LearnerId method, const MonteCarloConfig& config, int trial_index) {
    check_synth(config.synth);
    if (config.l_eval < 1) {
        throw DomainError("run_trial: need at least one evaluation snapshot");
    }
    if (trial_index < 0) {
        throw DomainError("run_trial: trial index must be nonnegative");
    }

    SynthConfig trial_cfg = config.synth;
    trial_cfg.seed = derive_seed(config.synth.seed, static_cast<std::uint64_t>(trial_index));
    const int l_train = trial_cfg.l;
    trial_cfg.l = l_train + config.l_eval;

    const EdgeSelection w_true = plant_graph(trial_cfg);
    const SignalMatrix x_full = generate_smooth_signals(w_true, trial_cfg);
    const SignalMatrix y_full = add_noise(x_full, trial_cfg.sigma, trial_cfg.seed);

    const SignalMatrix y_train = y_full.leftCols(l_train);
    const SignalMatrix y_eval = y_full.rightCols(config.l_eval);
    const SignalMatrix x_eval = x_full.rightCols(config.l_eval);

    const CandidateGraph graph(trial_cfg.n);
    const int k = trial_cfg.k_true;
    EdgeSelection w_hat = EdgeSelection::none(graph.edge_count());
    switch (method) {
        case LearnerId::NoiselessSorting:
            w_hat = select_k_smallest(edge_costs(y_train, graph), k);
            break;
        case LearnerId::AltMin: {
            AltMinConfig am;
            am.k = k;
            am.gamma = config.gamma;
            am.max_iter = config.altmin_max_iter;
            am.seed = derive_seed(trial_cfg.seed, kStreamAltMinInit);
            // Warm-start from the sorting solution on Y. A random subset at
            // this size descends into a local optimum worse than the sorting
            // baseline it is supposed to refine.
            am.init = AltMinInit::NoisySorting;
            w_hat = alt_min(y_train, am).selection;
            break;
        }
        case LearnerId::Relax: {
            RelaxConfig rc = config.relax;
            rc.k = k;
            rc.gamma = config.gamma;
            w_hat = learn_relax(y_train, rc).selection;
            break;
        }
    }

    RegularizationConfig reg;
    reg.gamma = config.gamma;
    const SignalMatrix x_hat = tikhonov_denoise(y_eval, assemble_laplacian(w_hat, graph), reg);

    TrialResult result;
    result.report = evaluate(w_hat, x_hat, w_true, x_eval);
    const double cells = static_cast<double>(y_eval.rows()) * static_cast<double>(y_eval.cols());
    result.raw_mse = (y_eval - x_eval).squaredNorm() / cells;
    return result;
}

MonteCarloReport monte_carlo(LearnerId method, const MonteCarloConfig& config,
                             const std::function<void(int, int)>& progress) {
    check_synth(config.synth);
    if (config.trials < 1) {
        throw DomainError("monte_carlo: need at least one trial");
    }
    if (config.l_eval < 1) {
        throw DomainError("monte_carlo: need at least one evaluation snapshot");
    }
    if (config.jobs < 1) {
        throw DomainError("monte_carlo: jobs must be >= 1");
    }

    const int trials = config.trials;
    std::vector<TrialResult> results(static_cast<std::size_t>(trials));
    std::atomic<int> next{0};
    std::atomic<bool> failed{false};
    std::mutex state_mutex;
    int fail_index = trials;
    std::string fail_message;
    int completed = 0;

    const auto worker = [&] {
        for (;;) {
            const int t = next.fetch_add(1);
            if (t >= trials || failed.load()) {
                return;
            }
            try {
                TrialResult r = run_trial(method, config, t);
                std::lock_guard<std::mutex> lock(state_mutex);
                results[static_cast<std::size_t>(t)] = r;
                ++completed;
                if (progress) {
                    progress(completed, trials);
                }
            } catch (const std::exception& e) {
                std::lock_guard<std::mutex> lock(state_mutex);
                if (t < fail_index) {
                    fail_index = t;
                    fail_message = e.what();
                }
                failed.store(true);
            }
        }
    };

    const int jobs = std::min(config.jobs, trials);
    if (jobs == 1) {
        worker();
    } else {
        std::vector<std::thread> pool;
        pool.reserve(static_cast<std::size_t>(jobs));
        for (int i = 0; i < jobs; ++i) {
            pool.emplace_back(worker);
        }
        for (auto& th : pool) {
            th.join();
        }
    }

    if (failed.load()) {
        const std::uint64_t seed =
            derive_seed(config.synth.seed, static_cast<std::uint64_t>(fail_index));
        throw SolverError("monte_carlo: trial " + std::to_string(fail_index) + " (seed " +
                              std::to_string(seed) + ") failed: " + fail_message,
                          -1.0, 0);
    }

    const auto collect = [&results](auto&& pick) {
        std::vector<double> values;
        values.reserve(results.size());
        for (const TrialResult& r : results) {
            values.push_back(pick(r));
        }
        return reduce(values);
    };

    MonteCarloReport report;
    report.mse = collect([](const TrialResult& r) { return r.report.mse; });
    report.edge_precision = collect([](const TrialResult& r) { return r.report.edge_precision; });
    report.edge_recall = collect([](const TrialResult& r) { return r.report.edge_recall; });
    report.edge_f1 = collect([](const TrialResult& r) { return r.report.edge_f1; });
    report.smoothness = collect([](const TrialResult& r) { return r.report.smoothness; });
    report.raw_mse = collect([](const TrialResult& r) { return r.raw_mse; });
    report.trials = trials;
    return report;
}

}  // namespace lforge

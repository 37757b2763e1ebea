#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <vector>

#include "lforge/altmin.hpp"
#include "lforge/denoise.hpp"
#include "lforge/experiments.hpp"
#include "lforge/io.hpp"
#include "lforge/noiseless.hpp"
#include "lforge/relax.hpp"

namespace {

bool verbose_logging() {
    const char* env = std::getenv("LAPLACE_FORGE_LOG");
    if (env == nullptr) {
        return false;
    }
    const std::string value(env);
    return !(value.empty() || value == "0" || value == "quiet" || value == "off");
}

void log_line(const std::string& line) {
    if (verbose_logging()) {
        std::fprintf(stderr, "%s\n", line.c_str());
    }
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.12g", v);
    return buf;
}

lforge::SignalMatrix read_signal(const std::string& path, bool transpose) {
    lforge::SignalMatrix x = lforge::read_signal_csv(path);
    if (transpose) {
        return x.transpose();
    }
    return x;
}

void write_signal(const std::string& path, const lforge::SignalMatrix& x, bool transpose) {
    if (transpose) {
        lforge::write_signal_csv(path, x.transpose());
    } else {
        lforge::write_signal_csv(path, x);
    }
}

/// "a,b,c" or "start:stop:step" (stop inclusive when hit exactly).
std::vector<double> parse_values(const std::string& text) {
    std::vector<double> values;
    if (text.find(':') != std::string::npos) {
        double start = 0.0;
        double stop = 0.0;
        double step = 0.0;
        if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || step <= 0.0) {
            throw lforge::DomainError("--values range must be start:stop:step with step > 0");
        }
        for (double v = start; v <= stop + 1e-12 * std::max(1.0, std::abs(stop)); v += step) {
            values.push_back(v);
        }
    } else {
        std::size_t pos = 0;
        while (pos <= text.size()) {
            const std::size_t comma = text.find(',', pos);
            const std::string cell =
                text.substr(pos, comma == std::string::npos ? std::string::npos : comma - pos);
            try {
                values.push_back(std::stod(cell));
            } catch (const std::exception&) {
                throw lforge::DomainError("--values entry '" + cell + "' is not a number");
            }
            if (comma == std::string::npos) {
                break;
            }
            pos = comma + 1;
        }
    }
    if (values.empty()) {
        throw lforge::DomainError("--values produced an empty list");
    }
    return values;
}

struct LearnFlags {
    std::string input;
    std::string output;
    std::string relaxed_output;
    int k = 1;
    double gamma = 1.0;
    std::uint64_t seed = 0;
    int max_iter = 0;  // 0 = module default
    double tol = 0.0;  // 0 = module default
    std::string init = "random";
    bool transpose = false;
};

int run_learn_noiseless(const LearnFlags& flags) {
    const lforge::SignalMatrix x = read_signal(flags.input, flags.transpose);
    const lforge::NoiselessResult result = lforge::learn_noiseless(x, flags.k);
    lforge::write_graph_json(flags.output, static_cast<int>(x.rows()), result.selection);
    std::printf("objective %s\n", fmt(result.smoothness).c_str());
    std::printf("iterations 1\n");
    std::printf("edges %d\n", result.selection.k());
    return 0;
}

int run_learn_altmin(const LearnFlags& flags) {
    const lforge::SignalMatrix y = read_signal(flags.input, flags.transpose);
    lforge::AltMinConfig cfg;
    cfg.k = flags.k;
    cfg.gamma = flags.gamma;
    cfg.seed = flags.seed;
    if (flags.max_iter > 0) {
        cfg.max_iter = flags.max_iter;
    }
    cfg.init = flags.init == "sorting" ? lforge::AltMinInit::NoisySorting
                                       : lforge::AltMinInit::RandomSubset;
    const lforge::AltMinResult result = lforge::alt_min(y, cfg);
    for (std::size_t i = 0; i < result.trace.objectives.size(); ++i) {
        log_line("half-step " + std::to_string(i) + " objective " +
                 fmt(result.trace.objectives[i]));
    }
    lforge::write_graph_json(flags.output, static_cast<int>(y.rows()), result.selection);
    std::printf("objective %s\n", fmt(result.objective).c_str());
    std::printf("iterations %d\n", result.trace.iterations_run);
    std::printf("converged %s\n", result.trace.converged ? "true" : "false");
    if (result.trace.stop == lforge::AltMinStop::IterationCap) {
        std::fprintf(stderr, "error: no fixed point within %d iterations\n", cfg.max_iter);
        return 3;
    }
    return 0;
}

int run_learn_relax(const LearnFlags& flags) {
    const lforge::SignalMatrix y = read_signal(flags.input, flags.transpose);
    lforge::RelaxConfig cfg;
    cfg.k = flags.k;
    cfg.gamma = flags.gamma;
    if (flags.max_iter > 0) {
        cfg.max_iter = flags.max_iter;
    }
    if (flags.tol > 0.0) {
        cfg.grad_tol = flags.tol;
    }
    const lforge::RelaxResult result = lforge::learn_relax(y, cfg);
    const lforge::RelaxTrace& trace = result.diagnostics.trace;
    for (std::size_t i = 0; i < trace.objectives.size(); ++i) {
        log_line("iterate " + std::to_string(i) + " r " + fmt(trace.objectives[i]));
    }
    lforge::write_graph_json(flags.output, static_cast<int>(y.rows()), result.selection);
    if (!flags.relaxed_output.empty()) {
        lforge::write_graph_json(flags.relaxed_output, static_cast<int>(y.rows()), result.relaxed);
    }
    std::printf("objective %s\n", fmt(result.diagnostics.r_rounded).c_str());
    std::printf("relaxed_objective %s\n", fmt(result.diagnostics.r_relaxed).c_str());
    std::printf("gap %s\n", fmt(result.diagnostics.gap).c_str());
    std::printf("iterations %d\n", trace.iterations_run);
    std::printf("converged %s\n", trace.converged ? "true" : "false");
    if (!trace.converged) {
        std::fprintf(stderr, "error: tolerances not reached within %d iterations\n", cfg.max_iter);
        return 3;
    }
    return 0;
}

struct DenoiseFlags {
    std::string input;
    std::string graph;
    std::string output;
    double gamma = 1.0;
    double tol = 0.0;
    bool transpose = false;
};

int run_denoise(const DenoiseFlags& flags) {
    const lforge::SignalMatrix y = read_signal(flags.input, flags.transpose);
    const lforge::GraphRecord record = lforge::read_graph_json(flags.graph);
    if (record.n != y.rows()) {
        throw lforge::DomainError("graph has " + std::to_string(record.n) + " nodes, signal has " +
                                  std::to_string(y.rows()) + " rows");
    }
    const lforge::CandidateGraph graph(record.n);
    const lforge::SparseLaplacian laplacian = lforge::assemble_laplacian(record.selection, graph);
    lforge::RegularizationConfig reg;
    reg.gamma = flags.gamma;
    if (flags.tol > 0.0) {
        reg.cg_tol = flags.tol;
    }
    const lforge::SignalMatrix x = lforge::tikhonov_denoise(y, laplacian, reg);
    write_signal(flags.output, x, flags.transpose);
    const double l = static_cast<double>(y.cols());
    std::printf("fidelity %s\n", fmt((y - x).squaredNorm() / l).c_str());
    std::printf("smoothness %s\n", fmt(lforge::laplacian_quadratic(laplacian, x) / l).c_str());
    return 0;
}

struct SynthFlags {
    int n = 20;
    int k = 40;
    int l = 50;
    double alpha = 10.0;
    double sigma = 0.5;
    std::uint64_t seed = 0;
    std::string graph_out = "graph.json";
    std::string clean_out = "clean.csv";
    std::string noisy_out = "noisy.csv";
    bool transpose = false;
};

int run_synth(const SynthFlags& flags) {
    lforge::SynthConfig cfg;
    cfg.n = flags.n;
    cfg.k_true = flags.k;
    cfg.l = flags.l;
    cfg.alpha = flags.alpha;
    cfg.sigma = flags.sigma;
    cfg.seed = flags.seed;
    const lforge::EdgeSelection w_true = lforge::plant_graph(cfg);
    const lforge::SignalMatrix x = lforge::generate_smooth_signals(w_true, cfg);
    const lforge::SignalMatrix y = lforge::add_noise(x, cfg.sigma, cfg.seed);
    lforge::write_graph_json(flags.graph_out, cfg.n, w_true);
    write_signal(flags.clean_out, x, flags.transpose);
    write_signal(flags.noisy_out, y, flags.transpose);
    std::printf("nodes %d\n", cfg.n);
    std::printf("edges %d\n", w_true.k());
    std::printf("snapshots %d\n", cfg.l);
    return 0;
}

struct EvalFlags {
    std::string sweep;
    std::string values;
    std::string input;
    std::string output;
    std::string learners = "noiseless,altmin,relax";
    int n = 20;
    int k = 40;
    int l = 50;
    int l_eval = 50;
    int trials = 100;
    int jobs = 1;
    double alpha = 10.0;
    double gamma = 1.0;
    std::uint64_t seed = 0;
    bool transpose = false;
};

int run_eval_sweep_k(const EvalFlags& flags) {
    if (flags.input.empty()) {
        throw lforge::DomainError("eval --sweep k needs --input signals");
    }
    const lforge::SignalMatrix x = read_signal(flags.input, flags.transpose);
    std::FILE* out = std::fopen(flags.output.c_str(), "wb");
    if (out == nullptr) {
        throw lforge::DomainError("cannot open " + flags.output + " for writing");
    }
    std::fprintf(out, "k,smoothness\n");
    for (const double value : parse_values(flags.values)) {
        const int k = static_cast<int>(std::llround(value));
        const lforge::NoiselessResult result = lforge::learn_noiseless(x, k);
        std::fprintf(out, "%d,%.17g\n", k, result.smoothness);
        log_line("k " + std::to_string(k) + " smoothness " + fmt(result.smoothness));
    }
    std::fclose(out);
    std::printf("wrote %s\n", flags.output.c_str());
    return 0;
}

int run_eval_sweep_sigma(const EvalFlags& flags) {
    std::vector<std::pair<std::string, lforge::LearnerId>> learners;
    std::size_t pos = 0;
    while (pos <= flags.learners.size()) {
        const std::size_t comma = flags.learners.find(',', pos);
        const std::string name = flags.learners.substr(
            pos, comma == std::string::npos ? std::string::npos : comma - pos);
        if (name == "noiseless") {
            learners.emplace_back(name, lforge::LearnerId::NoiselessSorting);
        } else if (name == "altmin") {
            learners.emplace_back(name, lforge::LearnerId::AltMin);
        } else if (name == "relax") {
            learners.emplace_back(name, lforge::LearnerId::Relax);
        } else {
            throw lforge::DomainError("unknown learner '" + name + "'");
        }
        if (comma == std::string::npos) {
            break;
        }
        pos = comma + 1;
    }

    std::FILE* out = std::fopen(flags.output.c_str(), "wb");
    if (out == nullptr) {
        throw lforge::DomainError("cannot open " + flags.output + " for writing");
    }
    std::fprintf(out,
                 "sigma,learner,mse,mse_stderr,edge_precision,edge_precision_stderr,"
                 "edge_recall,edge_recall_stderr,edge_f1,edge_f1_stderr,"
                 "smoothness,smoothness_stderr,raw_mse,raw_mse_stderr,trials\n");
    for (const double sigma : parse_values(flags.values)) {
        for (const auto& [name, id] : learners) {
            lforge::MonteCarloConfig cfg;
            cfg.synth.n = flags.n;
            cfg.synth.k_true = flags.k;
            cfg.synth.l = flags.l;
            cfg.synth.alpha = flags.alpha;
            cfg.synth.sigma = sigma;
            cfg.synth.seed = flags.seed;
            cfg.l_eval = flags.l_eval;
            cfg.trials = flags.trials;
            cfg.jobs = flags.jobs;
            cfg.gamma = flags.gamma;
            const bool chatty = verbose_logging();
            const lforge::MonteCarloReport report = lforge::monte_carlo(
                id, cfg,
                chatty ? std::function<void(int, int)>([&](int done, int total) {
                    if (done % 25 == 0 || done == total) {
                        std::fprintf(stderr, "sigma %s %s: %d/%d trials\n", fmt(sigma).c_str(),
                                     name.c_str(), done, total);
                    }
                })
                       : std::function<void(int, int)>{});
            std::fprintf(out,
                         "%.17g,%s,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g,"
                         "%.17g,%.17g,%d\n",
                         sigma, name.c_str(), report.mse.mean, report.mse.std_error,
                         report.edge_precision.mean, report.edge_precision.std_error,
                         report.edge_recall.mean, report.edge_recall.std_error,
                         report.edge_f1.mean, report.edge_f1.std_error, report.smoothness.mean,
                         report.smoothness.std_error, report.raw_mse.mean,
                         report.raw_mse.std_error, report.trials);
        }
    }
    std::fclose(out);
    std::printf("wrote %s\n", flags.output.c_str());
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"laplace-forge: sparse graph topology learning from smooth signals"};
    app.require_subcommand(1);

    LearnFlags learn_flags;
    CLI::App* learn = app.add_subcommand("learn", "Learn a K-edge graph from signal snapshots");
    learn->require_subcommand(1);

    const auto add_common_learn = [&learn_flags](CLI::App* cmd) {
        cmd->add_option("--input", learn_flags.input, "Signal CSV, rows = nodes")->required();
        cmd->add_option("--output", learn_flags.output, "Output graph JSON")->required();
        cmd->add_option("--k", learn_flags.k, "Edge budget")->required();
        cmd->add_flag("--transpose", learn_flags.transpose, "Input CSV is columns = nodes");
    };

    CLI::App* learn_noiseless =
        learn->add_subcommand("noiseless", "Rank-order per-edge smoothness costs");
    add_common_learn(learn_noiseless);

    CLI::App* learn_altmin =
        learn->add_subcommand("altmin", "Alternate denoising and edge selection");
    add_common_learn(learn_altmin);
    learn_altmin->add_option("--gamma", learn_flags.gamma, "Smoothness weight");
    learn_altmin->add_option("--seed", learn_flags.seed, "Initialization seed");
    learn_altmin->add_option("--max-iter", learn_flags.max_iter, "Outer iteration cap");
    learn_altmin->add_option("--init", learn_flags.init, "random | sorting")
        ->check(CLI::IsMember({"random", "sorting"}));

    CLI::App* learn_relax =
        learn->add_subcommand("relax", "Projected-gradient convex relaxation, then rounding");
    add_common_learn(learn_relax);
    learn_relax->add_option("--gamma", learn_flags.gamma, "Smoothness weight");
    learn_relax->add_option("--max-iter", learn_flags.max_iter, "Iteration cap");
    learn_relax->add_option("--tol", learn_flags.tol, "Projected-gradient norm tolerance");
    learn_relax->add_option("--relaxed-output", learn_flags.relaxed_output,
                            "Also write the pre-rounding relaxed weights");

    DenoiseFlags denoise_flags;
    CLI::App* denoise = app.add_subcommand("denoise", "Tikhonov-denoise signals against a graph");
    denoise->add_option("--input", denoise_flags.input, "Noisy signal CSV")->required();
    denoise->add_option("--graph", denoise_flags.graph, "Graph JSON")->required();
    denoise->add_option("--output", denoise_flags.output, "Denoised signal CSV")->required();
    denoise->add_option("--gamma", denoise_flags.gamma, "Smoothness weight");
    denoise->add_option("--tol", denoise_flags.tol, "Iterative solver residual tolerance");
    denoise->add_flag("--transpose", denoise_flags.transpose, "CSV files are columns = nodes");

    SynthFlags synth_flags;
    CLI::App* synth = app.add_subcommand("synth", "Generate a planted graph and smooth signals");
    synth->add_option("--n", synth_flags.n, "Nodes");
    synth->add_option("--k", synth_flags.k, "Planted edges");
    synth->add_option("--l", synth_flags.l, "Snapshots");
    synth->add_option("--alpha", synth_flags.alpha, "Synthesis smoothing strength");
    synth->add_option("--sigma", synth_flags.sigma, "Noise standard deviation");
    synth->add_option("--seed", synth_flags.seed, "RNG seed");
    synth->add_option("--graph-out", synth_flags.graph_out, "Ground-truth graph JSON path");
    synth->add_option("--clean-out", synth_flags.clean_out, "Clean signal CSV path");
    synth->add_option("--noisy-out", synth_flags.noisy_out, "Noisy signal CSV path");
    synth->add_flag("--transpose", synth_flags.transpose, "Write CSVs as columns = nodes");

    EvalFlags eval_flags;
    CLI::App* eval = app.add_subcommand("eval", "Sweep K or sigma and emit plot-ready series");
    eval->add_option("--sweep", eval_flags.sweep, "k | sigma")
        ->required()
        ->check(CLI::IsMember({"k", "sigma"}));
    eval->add_option("--values", eval_flags.values, "Comma list or start:stop:step")->required();
    eval->add_option("--output", eval_flags.output, "Output CSV series")->required();
    eval->add_option("--input", eval_flags.input, "Signal CSV (k sweep only)");
    eval->add_option("--learners", eval_flags.learners,
                     "Comma list from {noiseless, altmin, relax} (sigma sweep)");
    eval->add_option("--n", eval_flags.n, "Nodes (sigma sweep)");
    eval->add_option("--k", eval_flags.k, "Planted and learned edge budget (sigma sweep)");
    eval->add_option("--l", eval_flags.l, "Training snapshots (sigma sweep)");
    eval->add_option("--l-eval", eval_flags.l_eval, "Held-out snapshots (sigma sweep)");
    eval->add_option("--trials", eval_flags.trials, "Monte Carlo trials per point");
    eval->add_option("--jobs", eval_flags.jobs, "Worker threads");
    eval->add_option("--alpha", eval_flags.alpha, "Synthesis smoothing strength");
    eval->add_option("--gamma", eval_flags.gamma, "Smoothness weight for learners");
    eval->add_option("--seed", eval_flags.seed, "Master seed");
    eval->add_flag("--transpose", eval_flags.transpose, "Input CSV is columns = nodes");

    int exit_code = 0;
    learn_noiseless->callback([&] { exit_code = run_learn_noiseless(learn_flags); });
    learn_altmin->callback([&] { exit_code = run_learn_altmin(learn_flags); });
    learn_relax->callback([&] { exit_code = run_learn_relax(learn_flags); });
    denoise->callback([&] { exit_code = run_denoise(denoise_flags); });
    synth->callback([&] { exit_code = run_synth(synth_flags); });
    eval->callback([&] {
        exit_code = eval_flags.sweep == "k" ? run_eval_sweep_k(eval_flags)
                                            : run_eval_sweep_sigma(eval_flags);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    } catch (const lforge::SolverError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const lforge::DomainError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return exit_code;
}

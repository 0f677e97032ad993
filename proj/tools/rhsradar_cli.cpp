// Command-line front end: single-trial traces, Monte Carlo detection
// probability, parameter sweeps, and a built-in self test.

#include "rhsradar/harness.hpp"
#include "rhsradar/errors.hpp"

#include "CLI11.hpp"

#include <omp.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

namespace {

using namespace rhsradar;

std::string grid_list(const std::vector<int>& grids) {
    if (grids.empty())
        return "(no targets)";
    std::string out = "{";
    for (std::size_t i = 0; i < grids.size(); ++i) {
        if (i)
            out += ",";
        out += std::to_string(grids[i] + 1);
    }
    return out + "}";
}

int cmd_detect(const ExperimentConfig& cfg) {
    Rng rng(Rng::derive(cfg.seed, 0));
    const TrialResult result = run_detection(cfg, rng);
    const HypothesisSpace space = enumerate_hypotheses(cfg.grids, cfg.max_targets);

    std::printf("antenna: %s\n", cfg.antenna.c_str());
    std::printf("true hypothesis: %s\n",
                grid_list(space.hypotheses[static_cast<std::size_t>(result.true_hypothesis)])
                    .c_str());
    for (std::size_t c = 0; c < result.true_posterior_trace.size(); ++c)
        std::printf("cycle %zu: true-hypothesis posterior %.6f\n", c + 1,
                    result.true_posterior_trace[c]);
    std::printf("accepted: %s after %d cycle(s) -> %s\n",
                grid_list(space.hypotheses[static_cast<std::size_t>(result.accepted)]).c_str(),
                result.cycles_used, result.correct ? "correct" : "wrong");
    return 0;
}

int cmd_pd(const ExperimentConfig& cfg) {
    const PdEstimate est = monte_carlo_pd(cfg, cfg.trials);
    std::printf("trials: %d\n", est.trials);
    std::printf("pd: %.6f  (95%% Wilson: [%.6f, %.6f])\n", est.pd, est.wilson_lo, est.wilson_hi);
    std::printf("mean cycles: %.6f\n", est.mean_cycles);
    std::printf("partial credit: %.6f\n", est.partial_credit);
    return 0;
}

int cmd_sweep(const ExperimentConfig& cfg, const std::string& out_path) {
    const std::vector<SweepRow> rows = run_sweep(cfg);
    for (const SweepRow& row : rows)
        std::printf("%s %s=%.10g: pd %.6f, partial credit %.6f\n", row.antenna.c_str(),
                    cfg.sweep_axis.c_str(), row.axis_value, row.estimate.pd,
                    row.estimate.partial_credit);
    if (out_path.empty()) {
        write_csv(rows, std::cout);
        return 0;
    }
    std::ofstream out(out_path);
    if (!out)
        throw ConfigError("cannot open output file: " + out_path);
    write_csv(rows, out);
    std::printf("wrote %zu rows to %s\n", rows.size(), out_path.c_str());
    return 0;
}

void check(bool ok, const char* what) {
    std::printf("%s %s\n", ok ? "[ok]" : "[FAIL]", what);
    if (!ok)
        throw NumericalError(std::string("self test failed: ") + what);
}

int cmd_selftest() {
    check(hypothesis_count(4, 2) == 11, "hypothesis count C(4,0)+C(4,1)+C(4,2)");

    HypothesisSpace space = enumerate_hypotheses(4, 2);
    check(std::abs(space.priors.sum() - 1.0) < 1e-12, "priors sum to one");
    check(std::abs(space.priors(0) - 1.0 / 3.0) < 1e-12, "empty-scene prior 1/3");

    ExperimentConfig cfg;
    cfg.tx_elements = 8;
    cfg.rx_elements = 8;
    cfg.snapshots = 2;
    cfg.trials = 1;
    MeasurementContext ctx = make_context(cfg);
    Rng rng(7);
    OptimizationVariables init = initial_variables(space, ctx, cfg.power_max, rng);
    check(std::abs(transmit_power(init.vars, ctx) - cfg.power_max) < 1e-9 * cfg.power_max,
          "initial waveform at full power");

    WaoaDiagnostics diag;
    OptimizationVariables tuned = waoa(space, ctx, make_solver_config(cfg), init, &diag);
    bool monotone = true;
    for (std::size_t i = 1; i < diag.trace.size(); ++i)
        monotone = monotone && diag.trace[i] >= diag.trace[i - 1] - 1e-12 * std::abs(diag.trace[i - 1]);
    check(monotone, "optimizer trace is non-decreasing");
    check(tuned.objective >= init.objective, "optimizer does not lose ground");

    double lo = 0.0, hi = 0.0;
    wilson_interval(450, 500, lo, hi);
    check(lo < 0.9 && 0.9 < hi, "Wilson interval brackets the point estimate");

    std::printf("self test passed\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"Reconfigurable-surface radar detection toolkit"};
    app.require_subcommand(1);
    app.fallthrough();

    std::string config_path;
    std::string out_path;
    std::string antenna;
    std::uint64_t seed = 0;
    int trials = 0;
    int threads = 0;
    app.add_option("--config", config_path, "JSON experiment config");
    app.add_option("--seed", seed, "override the master seed");
    app.add_option("--trials", trials, "override the trial count");
    app.add_option("--out", out_path, "output CSV path (sweep)");
    app.add_option("--antenna", antenna, "override the antenna: rhs or pa");
    app.add_option("--threads", threads, "worker thread count");

    CLI::App* detect = app.add_subcommand("detect", "run one detection trial and print the trace");
    CLI::App* pd = app.add_subcommand("pd", "Monte Carlo detection probability");
    CLI::App* sweep = app.add_subcommand("sweep", "sweep an axis and write CSV");
    CLI::App* selftest = app.add_subcommand("selftest", "run built-in consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 2;
    }

    try {
        if (threads > 0)
            omp_set_num_threads(threads);

        ExperimentConfig cfg;
        if (!config_path.empty())
            cfg = load_config(config_path);
        if (app.count("--seed"))
            cfg.seed = seed;
        if (app.count("--trials"))
            cfg.trials = trials;
        if (app.count("--antenna"))
            cfg.antenna = antenna;
        validate_config(cfg);

        if (detect->parsed())
            return cmd_detect(cfg);
        if (pd->parsed())
            return cmd_pd(cfg);
        if (sweep->parsed())
            return cmd_sweep(cfg, out_path);
        if (selftest->parsed())
            return cmd_selftest();
        return 2;
    } catch (const rhsradar::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const rhsradar::NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return 3;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
}

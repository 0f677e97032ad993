// Compares the parallel kernels against their serial reference
// implementations: wall time plus an exact-equality check, since both sides
// reduce contributions in the same order.

#include "rhsradar/harness.hpp"

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>

namespace {

using namespace rhsradar;

double time_ms(const std::function<void()>& fn, int repeats) {
    fn(); // warm up
    const auto start = std::chrono::steady_clock::now();
    for (int i = 0; i < repeats; ++i)
        fn();
    const auto stop = std::chrono::steady_clock::now();
    return std::chrono::duration<double, std::milli>(stop - start).count() / repeats;
}

void report(const char* name, double serial_ms, double parallel_ms, bool identical) {
    std::printf("%-22s serial %9.3f ms   parallel %9.3f ms   speedup %5.2fx   %s\n", name,
                serial_ms, parallel_ms, serial_ms / parallel_ms,
                identical ? "identical" : "MISMATCH");
}

} // namespace

int main() {
    std::printf("threads available: %d\n\n", omp_get_max_threads());

    ExperimentConfig cfg;
    cfg.tx_elements = 32;
    cfg.rx_elements = 32;
    cfg.snapshots = 6;
    cfg.grids = 6;
    cfg.max_targets = 2;
    cfg.true_grids = {1, 2};
    const MeasurementContext ctx = make_context(cfg);
    const HypothesisSpace space = enumerate_hypotheses(cfg.grids, cfg.max_targets);
    const RealMatrix weights = weight_table(space.priors);

    Rng rng(11);
    const RadarVariables vars = initial_variables(space, ctx, cfg.power_max, rng).vars;
    const std::vector<ComplexVector> signals = effective_signals(space.hypotheses, vars, ctx);
    const NoiseCovariance noise =
        noise_covariance(vars.rx_amplitudes, ctx.rx_propagation, ctx.noise_power, ctx.rx_snapshots);

    {
        double r = 0.0;
        const double serial =
            time_ms([&] { r += weighted_objective_serial(signals, weights, noise); }, 20);
        const double parallel = time_ms([&] { r += weighted_objective(signals, weights, noise); }, 20);
        const bool same = weighted_objective_serial(signals, weights, noise) ==
                          weighted_objective(signals, weights, noise);
        report("weighted objective", serial, parallel, same);
        (void)r;
    }
    {
        WaveformForms a, b;
        const double serial =
            time_ms([&] { a = build_waveform_forms_serial(space, weights, vars, ctx); }, 5);
        const double parallel = time_ms([&] { b = build_waveform_forms(space, weights, vars, ctx); }, 5);
        report("waveform forms", serial, parallel,
               (a.R.array() == b.R.array()).all() && (a.S.array() == b.S.array()).all());
    }
    {
        TransmitForms a, b;
        const double serial =
            time_ms([&] { a = build_transmit_forms_serial(space, weights, vars, ctx); }, 5);
        const double parallel = time_ms([&] { b = build_transmit_forms(space, weights, vars, ctx); }, 5);
        report("transmit forms", serial, parallel,
               (a.R.array() == b.R.array()).all() &&
                   (a.S_diag.array() == b.S_diag.array()).all());
    }
    {
        ReceiveForms a, b;
        const double serial = time_ms([&] { a = build_receive_forms_serial(space, weights, vars, ctx); }, 5);
        const double parallel = time_ms([&] { b = build_receive_forms(space, weights, vars, ctx); }, 5);
        bool same = a.R.size() == b.R.size();
        for (std::size_t l = 0; same && l < a.R.size(); ++l)
            same = (a.R[l].array() == b.R[l].array()).all() &&
                   (a.S_diag[l].array() == b.S_diag[l].array()).all();
        report("receive forms", serial, parallel, same);
    }
    {
        ExperimentConfig mc = cfg;
        mc.tx_elements = 16;
        mc.rx_elements = 16;
        mc.grids = 4;
        mc.snapshots = 4;
        mc.max_cycles = 3;
        const int trials = 8;
        PdEstimate a, b;
        const double serial = time_ms([&] { a = monte_carlo_pd_serial(mc, trials); }, 1);
        const double parallel = time_ms([&] { b = monte_carlo_pd(mc, trials); }, 1);
        report("detection trials", serial, parallel,
               a.pd == b.pd && a.mean_cycles == b.mean_cycles &&
                   a.partial_credit == b.partial_credit);
    }
    return 0;
}

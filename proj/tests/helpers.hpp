#ifndef RHSRADAR_TEST_HELPERS_HPP
#define RHSRADAR_TEST_HELPERS_HPP

#include "rhsradar/harness.hpp"

namespace testutil {

using namespace rhsradar;

/// Measurement context with the study geometry rules at arbitrary sizes.
inline MeasurementContext make_ctx(int tx_elements, int rx_elements, int tx_feeds, int rx_feeds,
                                   int snapshots, int grids) {
    ExperimentConfig cfg;
    cfg.tx_elements = tx_elements;
    cfg.rx_elements = rx_elements;
    cfg.tx_feeds = tx_feeds;
    cfg.rx_feeds = rx_feeds;
    cfg.snapshots = snapshots;
    cfg.grids = grids;
    cfg.max_targets = 1;
    cfg.true_grids = {1};
    return make_context(cfg);
}

inline Waveform random_waveform(Eigen::Index n_feeds, Eigen::Index n_snapshots, Rng& rng) {
    Waveform w;
    w.signals.resize(n_feeds, n_snapshots);
    for (Eigen::Index i = 0; i < n_snapshots; ++i)
        for (Eigen::Index l = 0; l < n_feeds; ++l)
            w.signals(l, i) = rng.complex_normal(1.0);
    return w;
}

/// Amplitudes bounded away from zero so covariances stay well conditioned.
inline AmplitudeVector random_amplitudes(Eigen::Index n, Rng& rng) {
    AmplitudeVector amp;
    amp.values.resize(n);
    for (Eigen::Index i = 0; i < n; ++i)
        amp.values(i) = 0.05 + 0.95 * rng.uniform();
    return amp;
}

inline RadarVariables random_vars(const MeasurementContext& ctx, Rng& rng) {
    RadarVariables vars;
    vars.waveform = random_waveform(ctx.tx_geometry.n_feeds(), ctx.tx_snapshots, rng);
    vars.tx_amplitudes = random_amplitudes(ctx.tx_geometry.n_elements(), rng);
    vars.rx_amplitudes = random_amplitudes(ctx.rx_geometry.n_elements(), rng);
    return vars;
}

/// Random point on the probability simplex, entries bounded away from zero.
inline RealVector random_priors(Eigen::Index n, Rng& rng) {
    RealVector p(n);
    for (Eigen::Index i = 0; i < n; ++i)
        p(i) = 0.1 + rng.uniform();
    return p / p.sum();
}

inline ComplexVector random_complex_vector(Eigen::Index n, Rng& rng) {
    ComplexVector v(n);
    for (Eigen::Index i = 0; i < n; ++i)
        v(i) = rng.complex_normal(1.0);
    return v;
}

} // namespace testutil

#endif

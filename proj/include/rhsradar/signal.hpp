#ifndef RHSRADAR_SIGNAL_HPP
#define RHSRADAR_SIGNAL_HPP

#include "rhsradar/rng.hpp"
#include "rhsradar/surface.hpp"

#include <vector>

namespace rhsradar {

/// Feed signals by snapshot, L_t x I_t. The column-stacked form is the
/// optimization variable.
struct Waveform {
    ComplexMatrix signals; // L_t x I_t

    Eigen::Index n_feeds() const { return signals.rows(); }
    Eigen::Index n_snapshots() const { return signals.cols(); }

    /// Column-stacked vector view of the feed signals.
    ComplexVector stacked() const {
        return Eigen::Map<const ComplexVector>(signals.data(), signals.size());
    }
    static Waveform from_stacked(const ComplexVector& x, Eigen::Index n_feeds) {
        Waveform w;
        w.signals = Eigen::Map<const ComplexMatrix>(x.data(), n_feeds, x.size() / n_feeds);
        return w;
    }
};

/// Per-element radiation amplitudes, each in [0, 1].
struct AmplitudeVector {
    RealVector values;

    bool in_box(double slack = 0.0) const {
        return (values.array() >= -slack).all() && (values.array() <= 1.0 + slack).all();
    }
};

struct Target {
    Direction direction;
    Complex reflection{1.0, 0.0};
};

/// True targets in the field of view; directions must be pairwise distinct.
struct Scene {
    std::vector<Target> targets;
};

/**
 * Everything needed to map (waveform, amplitudes, hypothesis) onto an
 * effective received signal and its noise statistics.
 */
struct MeasurementContext {
    SurfaceGeometry tx_geometry;
    SurfaceGeometry rx_geometry;
    PropagationModel tx_propagation;
    PropagationModel rx_propagation;
    double wavelength = 0.0;
    double noise_power = 1.0; // per complex entry of the element noise
    int tx_snapshots = 1;
    int rx_snapshots = 1; // constrained equal to tx_snapshots
    std::vector<Direction> grid_directions;
    ComplexVector grid_reflection; // detector-assumed reflection per grid

    Eigen::Index measurement_size() const { return rx_geometry.n_feeds() * rx_snapshots; }
    Scene scene_of(const std::vector<int>& grid_indices) const;
};

/// The per-cycle transceiver controls the optimizer adjusts.
struct RadarVariables {
    Waveform waveform;
    AmplitudeVector tx_amplitudes;
    AmplitudeVector rx_amplitudes;
};

/// Block-diagonal noise covariance of the combined measurement: rx_snapshots
/// identical diagonal blocks, one variance per receive feed.
struct NoiseCovariance {
    RealVector feed_variances; // length L_r, strictly positive
    int snapshots = 1;

    Eigen::Index size() const { return feed_variances.size() * snapshots; }
    /// Diagonal of the full covariance in column-stacked measurement order.
    RealVector diagonal() const;
    /// Dense covariance matrix (tests and small problems only).
    RealMatrix dense() const;
    /// (a - b)^H Sigma^{-1} (a - b), using the diagonal structure.
    double quadratic_inverse_form(const ComplexVector& a, const ComplexVector& b) const;
};

/// Radiated element signals: diag(tx_amp) * (phase o attenuation) * X.
ComplexMatrix transmit(const Waveform& waveform, const AmplitudeVector& tx_amplitudes,
                       const PropagationModel& tx_propagation);

/// Far-field reflection of the radiated signals off the scene's targets,
/// plus element noise: sum_k beta_k a_r a_t^T S + W.
ComplexMatrix reflect(const ComplexMatrix& radiated, const Scene& scene,
                      const ComplexMatrix& element_noise, const MeasurementContext& ctx);

/// Feed-combined receive signals: [diag(rx_amp) * (phase o attenuation)]^T V.
ComplexMatrix receive(const ComplexMatrix& incident, const AmplitudeVector& rx_amplitudes,
                      const PropagationModel& rx_propagation);

/// Noise-free combined measurement under a hypothesis (set of occupied grids),
/// column-stacked over snapshots.
ComplexVector effective_signal(const std::vector<int>& grid_indices, const Waveform& waveform,
                               const AmplitudeVector& tx_amplitudes,
                               const AmplitudeVector& rx_amplitudes,
                               const MeasurementContext& ctx);

/// Effective signals for a list of hypotheses, sharing per-grid work.
std::vector<ComplexVector> effective_signals(const std::vector<std::vector<int>>& hypotheses,
                                             const RadarVariables& vars,
                                             const MeasurementContext& ctx);

/// Covariance model of the feed-combined noise. Throws NumericalError when
/// the amplitudes are identically zero (singular covariance).
NoiseCovariance noise_covariance(const AmplitudeVector& rx_amplitudes,
                                 const PropagationModel& rx_propagation, double noise_power,
                                 int rx_snapshots);

/// One noisy measurement of the true scene: effective signal plus element
/// noise carried through the receive chain.
ComplexVector simulate_measurement(const Scene& scene, const RadarVariables& vars,
                                   const MeasurementContext& ctx, Rng& rng);

} // namespace rhsradar

#endif

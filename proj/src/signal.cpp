#include "rhsradar/signal.hpp"

#include "rhsradar/errors.hpp"

#include <stdexcept>

namespace rhsradar {

namespace {

constexpr double kBoxSlack = 1e-12;

void check_amplitudes(const AmplitudeVector& amp, Eigen::Index n_elements, const char* which) {
    if (amp.values.size() != n_elements)
        throw std::invalid_argument(std::string(which) + " amplitude length mismatch");
    if (!amp.in_box(kBoxSlack))
        throw std::invalid_argument(std::string(which) + " amplitudes outside [0, 1]");
}

} // namespace

Scene MeasurementContext::scene_of(const std::vector<int>& grid_indices) const {
    Scene scene;
    scene.targets.reserve(grid_indices.size());
    for (int g : grid_indices) {
        if (g < 0 || g >= static_cast<int>(grid_directions.size()))
            throw std::invalid_argument("grid index out of range");
        Complex beta = grid_reflection.size() > 0 ? grid_reflection(g) : Complex(1.0, 0.0);
        scene.targets.push_back({grid_directions[static_cast<std::size_t>(g)], beta});
    }
    return scene;
}

RealVector NoiseCovariance::diagonal() const {
    RealVector diag(size());
    for (int i = 0; i < snapshots; ++i)
        diag.segment(i * feed_variances.size(), feed_variances.size()) = feed_variances;
    return diag;
}

RealMatrix NoiseCovariance::dense() const {
    return diagonal().asDiagonal();
}

double NoiseCovariance::quadratic_inverse_form(const ComplexVector& a, const ComplexVector& b) const {
    if (a.size() != size() || b.size() != size())
        throw std::invalid_argument("quadratic form dimension mismatch");
    double total = 0.0;
    const Eigen::Index l = feed_variances.size();
    for (int i = 0; i < snapshots; ++i)
        total += ((a - b).segment(i * l, l).array().abs2() / feed_variances.array()).sum();
    return total;
}

ComplexMatrix transmit(const Waveform& waveform, const AmplitudeVector& tx_amplitudes,
                       const PropagationModel& tx_propagation) {
    const Eigen::Index n = tx_propagation.phase.rows();
    const Eigen::Index l = tx_propagation.phase.cols();
    if (waveform.n_feeds() != l)
        throw std::invalid_argument("waveform feed count does not match the transmit surface");
    check_amplitudes(tx_amplitudes, n, "transmit");
    return tx_amplitudes.values.asDiagonal() * (tx_propagation.transfer() * waveform.signals);
}

ComplexMatrix reflect(const ComplexMatrix& radiated, const Scene& scene,
                      const ComplexMatrix& element_noise, const MeasurementContext& ctx) {
    const Eigen::Index n_rx = ctx.rx_geometry.n_elements();
    if (element_noise.rows() != n_rx || element_noise.cols() != radiated.cols())
        throw std::invalid_argument("element noise dimension mismatch");
    ComplexMatrix incident = element_noise;
    for (const Target& target : scene.targets) {
        ComplexVector a_r = steering_vector(ctx.rx_geometry, target.direction, ctx.wavelength);
        ComplexVector a_t = steering_vector(ctx.tx_geometry, target.direction, ctx.wavelength);
        incident.noalias() += target.reflection * a_r * (a_t.transpose() * radiated);
    }
    return incident;
}

ComplexMatrix receive(const ComplexMatrix& incident, const AmplitudeVector& rx_amplitudes,
                      const PropagationModel& rx_propagation) {
    const Eigen::Index n = rx_propagation.phase.rows();
    if (incident.rows() != n)
        throw std::invalid_argument("incident signal does not match the receive surface");
    check_amplitudes(rx_amplitudes, n, "receive");
    ComplexMatrix combine = rx_amplitudes.values.asDiagonal() * rx_propagation.transfer();
    return combine.transpose() * incident;
}

ComplexVector effective_signal(const std::vector<int>& grid_indices, const Waveform& waveform,
                               const AmplitudeVector& tx_amplitudes,
                               const AmplitudeVector& rx_amplitudes,
                               const MeasurementContext& ctx) {
    ComplexMatrix radiated = transmit(waveform, tx_amplitudes, ctx.tx_propagation);
    ComplexMatrix zero = ComplexMatrix::Zero(ctx.rx_geometry.n_elements(), radiated.cols());
    ComplexMatrix incident = reflect(radiated, ctx.scene_of(grid_indices), zero, ctx);
    ComplexMatrix combined = receive(incident, rx_amplitudes, ctx.rx_propagation);
    return Eigen::Map<const ComplexVector>(combined.data(), combined.size());
}

std::vector<ComplexVector> effective_signals(const std::vector<std::vector<int>>& hypotheses,
                                             const RadarVariables& vars,
                                             const MeasurementContext& ctx) {
    const Eigen::Index m = ctx.measurement_size();
    const Eigen::Index n_grids = static_cast<Eigen::Index>(ctx.grid_directions.size());

    // Each occupied grid contributes a fixed vector, so precompute one
    // contribution per grid and sum subsets.
    ComplexMatrix radiated = transmit(vars.waveform, vars.tx_amplitudes, ctx.tx_propagation);
    check_amplitudes(vars.rx_amplitudes, ctx.rx_geometry.n_elements(), "receive");
    ComplexMatrix combine =
        vars.rx_amplitudes.values.asDiagonal() * ctx.rx_propagation.transfer();

    ComplexMatrix per_grid(m, n_grids);
    for (Eigen::Index g = 0; g < n_grids; ++g) {
        const Direction& dir = ctx.grid_directions[static_cast<std::size_t>(g)];
        ComplexVector a_r = steering_vector(ctx.rx_geometry, dir, ctx.wavelength);
        ComplexVector a_t = steering_vector(ctx.tx_geometry, dir, ctx.wavelength);
        Complex beta = ctx.grid_reflection.size() > 0 ? ctx.grid_reflection(g) : Complex(1.0, 0.0);
        ComplexVector feed_gain = combine.transpose() * a_r;           // L_r
        Eigen::RowVectorXcd snapshot_gain = a_t.transpose() * radiated; // 1 x I_r
        ComplexMatrix block = beta * feed_gain * snapshot_gain;
        per_grid.col(g) = Eigen::Map<const ComplexVector>(block.data(), block.size());
    }

    std::vector<ComplexVector> signals;
    signals.reserve(hypotheses.size());
    for (const std::vector<int>& grids : hypotheses) {
        ComplexVector u = ComplexVector::Zero(m);
        for (int g : grids) {
            if (g < 0 || g >= n_grids)
                throw std::invalid_argument("grid index out of range");
            u += per_grid.col(g);
        }
        signals.push_back(std::move(u));
    }
    return signals;
}

NoiseCovariance noise_covariance(const AmplitudeVector& rx_amplitudes,
                                 const PropagationModel& rx_propagation, double noise_power,
                                 int rx_snapshots) {
    const Eigen::Index n = rx_propagation.attenuation.rows();
    check_amplitudes(rx_amplitudes, n, "receive");
    if (noise_power <= 0.0)
        throw std::invalid_argument("noise power must be positive");
    if (rx_snapshots < 1)
        throw std::invalid_argument("snapshot count must be positive");

    NoiseCovariance cov;
    cov.snapshots = rx_snapshots;
    Eigen::ArrayXXd weighted =
        rx_propagation.attenuation.array().colwise() * rx_amplitudes.values.array();
    cov.feed_variances = noise_power * weighted.square().colwise().sum().transpose().matrix();
    if ((cov.feed_variances.array() <= 0.0).any())
        throw NumericalError("noise covariance is singular: receive amplitudes are all zero");
    return cov;
}

ComplexVector simulate_measurement(const Scene& scene, const RadarVariables& vars,
                                   const MeasurementContext& ctx, Rng& rng) {
    ComplexMatrix radiated = transmit(vars.waveform, vars.tx_amplitudes, ctx.tx_propagation);
    ComplexMatrix noise(ctx.rx_geometry.n_elements(), radiated.cols());
    for (Eigen::Index j = 0; j < noise.cols(); ++j)
        for (Eigen::Index i = 0; i < noise.rows(); ++i)
            noise(i, j) = rng.complex_normal(ctx.noise_power);
    ComplexMatrix incident = reflect(radiated, scene, noise, ctx);
    ComplexMatrix combined = receive(incident, vars.rx_amplitudes, ctx.rx_propagation);
    return Eigen::Map<const ComplexVector>(combined.data(), combined.size());
}

} // namespace rhsradar

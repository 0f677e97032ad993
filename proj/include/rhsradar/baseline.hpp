#ifndef RHSRADAR_BASELINE_HPP
#define RHSRADAR_BASELINE_HPP

#include "rhsradar/optimizer.hpp"

namespace rhsradar {

/**
 * Comparison radar: conventional phased arrays with per-element phase-only
 * control, a fixed feed attenuation on every weight, and a single waveform
 * chain. Only the grid directions, wavelength, noise power, and snapshot
 * count are read from the MeasurementContext; the arrays' own geometries
 * live here.
 */
struct PhasedArrayModel {
    SurfaceGeometry tx_geometry;
    SurfaceGeometry rx_geometry;
    RealVector tx_phases; // radians, one per element
    RealVector rx_phases;
    double feed_gain = 0.9;
    double cost_ratio = 6.0; // cost of one phased-array element in RHS-element units

    ComplexVector tx_weights() const;
    ComplexVector rx_weights() const;
};

/// Hardware cost accounting used by the equal-cost comparisons.
struct CostModel {
    double rhs_element_cost = 1.0;
    double pa_element_cost = 6.0;

    double rhs_cost(int n_elements) const { return n_elements * rhs_element_cost; }
    double pa_cost(int n_elements) const { return n_elements * pa_element_cost; }
};

/// Scalar coupling per hypothesis: c_j = sum over occupied grids of
/// beta * (w_r^T a_r)(a_t^T w_t).
ComplexVector pa_couplings(const HypothesisSpace& space, const PhasedArrayModel& model,
                           const MeasurementContext& ctx);

/// Noise-free combined measurement under a hypothesis: c * waveform.
ComplexVector pa_effective_signal(const std::vector<int>& grid_indices,
                                  const ComplexVector& waveform, const PhasedArrayModel& model,
                                  const MeasurementContext& ctx);

/// Combined receive noise: a single output with variance
/// noise_power * feed_gain^2 * N_r per snapshot (phase-only weights keep it
/// constant).
NoiseCovariance pa_noise_covariance(const PhasedArrayModel& model, const MeasurementContext& ctx);

/// Radiated power tr{SS^H} for S = w_t x^T.
double pa_transmit_power(const PhasedArrayModel& model, const ComplexVector& waveform);

/// One noisy measurement of the true scene through the phased-array chain.
ComplexVector pa_simulate_measurement(const Scene& scene, const ComplexVector& waveform,
                                      const PhasedArrayModel& model,
                                      const MeasurementContext& ctx, Rng& rng);

/// The same weighted pairwise-distance objective as the holographic chain.
double pa_objective(const HypothesisSpace& space, const PhasedArrayModel& model,
                    const ComplexVector& waveform, const MeasurementContext& ctx);

struct PaOptimizationResult {
    PhasedArrayModel model;
    ComplexVector waveform;
    double objective = 0.0;
    int iterations = 0;
    bool flat = false; // objective form vanished at some step
};

/// Random phases and a full-power random waveform, seeded.
PaOptimizationResult pa_initial(const HypothesisSpace& space, const PhasedArrayModel& model,
                                const MeasurementContext& ctx, double power_max, Rng& rng);

/**
 * Alternating maximization: full-power waveform step (the objective is
 * isotropic in the waveform), then transmit/receive phase steps that take
 * the top eigenvector of the pairwise form and keep only its phases,
 * each accepted only if the objective improves (when the safeguard is on).
 */
PaOptimizationResult pa_optimize(const HypothesisSpace& space, const MeasurementContext& ctx,
                                 const SolverConfig& cfg, const PaOptimizationResult& init);

} // namespace rhsradar

#endif

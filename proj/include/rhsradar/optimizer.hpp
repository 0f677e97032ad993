#ifndef RHSRADAR_OPTIMIZER_HPP
#define RHSRADAR_OPTIMIZER_HPP

#include "rhsradar/objective.hpp"

#include <vector>

namespace rhsradar {

struct SolverConfig {
    double power_max = 10.0;
    double tol_outer = 1e-4; // relative change of the objective between outer iterations
    double tol_fp = 1e-6;    // relative change of the sum of ratios between FP iterations
    int max_outer = 30;
    int max_fp = 200;
    bool safeguard = true; // roll back any block step that lowers the objective
};

/// One point of the joint design space together with its objective value.
struct OptimizationVariables {
    RadarVariables vars;
    double objective = 0.0;
};

struct WaveformSolution {
    Waveform waveform;
    bool flat = false; // objective form was zero; returned point is merely feasible
};

struct AmplitudeSolution {
    AmplitudeVector amplitudes;
    bool flat = false;
};

/// Spectral data of the receive forms reused across FP iterations: per feed,
/// eigenpairs of the symmetric part of R[l] plus the denominator diagonal.
struct ReceiveSpectral {
    std::vector<RealMatrix> basis;       // eigenvectors, columns, descending eigenvalues
    std::vector<RealVector> gains;       // eigenvalues clamped at zero
    std::vector<RealVector> noise_diag;  // denominator diagonals
};

/// Auxiliary variables of the sum-of-ratios reformulation, one per feed.
struct FpAuxiliary {
    std::vector<RealVector> xi;
};

struct WaoaDiagnostics {
    std::vector<double> trace; // objective value after each outer iteration, initial first
    int iterations = 0;
    bool hit_cap = false;
    bool flat_step = false; // some block solver saw a zero objective form
};

/// Radiated power tr{SS^H} for the given variables.
double transmit_power(const RadarVariables& vars, const MeasurementContext& ctx);

/**
 * Waveform step: maximize x^H R x subject to x^H S x <= power_max. Whitens by
 * the pseudo-inverse square root of S and takes the top eigenvector; the
 * returned point meets the power bound with equality whenever R is nonzero.
 */
WaveformSolution solve_waveform(const ComplexMatrix& R, const ComplexMatrix& S, double power_max,
                                Eigen::Index n_feeds);

/**
 * Transmit amplitude step: approximately maximize psi^T Re(R) psi subject to
 * psi in [0,1]^N and psi^T diag(S_diag) psi <= power_max. Takes the dominant
 * signed part of the whitened top eigenvector, then rescales to meet both the
 * box and the power constraint.
 */
AmplitudeSolution solve_transmit(const ComplexMatrix& R, const RealVector& S_diag,
                                 double power_max);

/// The true receive objective: sum over feeds of the Rayleigh-style ratios.
double sum_of_ratios(const AmplitudeVector& rx_amplitudes, const ReceiveForms& forms);

ReceiveSpectral prepare_receive_spectral(const ReceiveForms& forms);

/// Auxiliary-variable update of the quadratic-transform surrogate; exact
/// maximizer, so substituting it recovers the sum of ratios.
FpAuxiliary fp_xi_update(const AmplitudeVector& rx_amplitudes, const ReceiveSpectral& spectral);

/// Amplitude update at fixed auxiliaries: the surrogate is a concave
/// separable quadratic, so clipping its unconstrained maximizer to [0,1] is
/// the exact box-constrained maximum. Flat surrogate returns `current`.
AmplitudeVector fp_psi_update(const FpAuxiliary& aux, const ReceiveSpectral& spectral,
                              const AmplitudeVector& current);

/// Surrogate value at (psi, xi); equals the sum of ratios at xi = xi*(psi).
double fp_surrogate(const AmplitudeVector& rx_amplitudes, const FpAuxiliary& aux,
                    const ReceiveSpectral& spectral);

/// Receive amplitude step: alternate the two updates until the sum of ratios
/// stalls or the iteration cap; returns the best iterate seen.
AmplitudeVector solve_receive(const ReceiveForms& forms, const SolverConfig& cfg,
                              const AmplitudeVector& init);

/// All-ones amplitudes and a random Gaussian waveform scaled to full power.
OptimizationVariables initial_variables(const HypothesisSpace& space,
                                        const MeasurementContext& ctx, double power_max,
                                        Rng& rng);

/**
 * Outer loop: waveform step, transmit amplitude step, receive amplitude step
 * per iteration, each re-evaluated through the full objective and (with the
 * safeguard on) rolled back when it does not improve. Stops when the
 * objective change falls below tol_outer (relative) or at max_outer.
 */
OptimizationVariables waoa(const HypothesisSpace& space, const MeasurementContext& ctx,
                           const SolverConfig& cfg, const OptimizationVariables& init,
                           WaoaDiagnostics* diagnostics = nullptr);

} // namespace rhsradar

#endif

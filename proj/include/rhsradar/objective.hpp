#ifndef RHSRADAR_OBJECTIVE_HPP
#define RHSRADAR_OBJECTIVE_HPP

#include "rhsradar/hypothesis.hpp"
#include "rhsradar/signal.hpp"

#include <vector>

namespace rhsradar {

/**
 * The detection objective is the prior-weighted sum of Mahalanobis distances
 * between all pairs of hypothesis signals. Each block-coordinate subproblem
 * rewrites it as quadratic forms in one variable with the others held fixed;
 * the builders below produce those forms.
 */

/// Forms in the column-stacked waveform x: objective x^H R x, transmit power
/// x^H S x. Both are Hermitian PSD with identical blocks per snapshot.
struct WaveformForms {
    ComplexMatrix R;
    ComplexMatrix S;
};

/// Forms in the transmit amplitude vector: objective psi^T Re(R) psi, power
/// psi^T diag(S_diag) psi.
struct TransmitForms {
    ComplexMatrix R;
    RealVector S_diag;
};

/// Forms in the receive amplitude vector: the objective is the sum over
/// feeds of (psi^T R[l] psi) / (psi^T diag(S_diag[l]) psi); the denominator
/// is that feed's combined noise variance.
struct ReceiveForms {
    std::vector<ComplexMatrix> R;
    std::vector<RealVector> S_diag;
};

struct QuadraticFormSet {
    WaveformForms waveform;
    TransmitForms transmit;
    ReceiveForms receive;
};

/// omega_ij = p_i p_j for i != j, zero on the diagonal.
RealMatrix weight_table(const RealVector& priors);

/// Mahalanobis distance between two hypothesis signals under the noise model.
double pairwise_distance(const ComplexVector& a, const ComplexVector& b,
                         const NoiseCovariance& noise);

/// Weighted sum of pairwise distances over the upper triangle of `weights`.
double weighted_objective(const std::vector<ComplexVector>& signals, const RealMatrix& weights,
                          const NoiseCovariance& noise);
double weighted_objective_serial(const std::vector<ComplexVector>& signals,
                                 const RealMatrix& weights, const NoiseCovariance& noise);

/// Same, deriving signals, weights (from the space's current probabilities),
/// and the noise model from the context.
double weighted_objective(const HypothesisSpace& space, const RadarVariables& vars,
                          const MeasurementContext& ctx);

WaveformForms build_waveform_forms(const HypothesisSpace& space, const RealMatrix& weights,
                                   const RadarVariables& vars, const MeasurementContext& ctx);
WaveformForms build_waveform_forms_serial(const HypothesisSpace& space, const RealMatrix& weights,
                                          const RadarVariables& vars,
                                          const MeasurementContext& ctx);

TransmitForms build_transmit_forms(const HypothesisSpace& space, const RealMatrix& weights,
                                   const RadarVariables& vars, const MeasurementContext& ctx);
TransmitForms build_transmit_forms_serial(const HypothesisSpace& space, const RealMatrix& weights,
                                          const RadarVariables& vars,
                                          const MeasurementContext& ctx);

ReceiveForms build_receive_forms(const HypothesisSpace& space, const RealMatrix& weights,
                                 const RadarVariables& vars, const MeasurementContext& ctx);
ReceiveForms build_receive_forms_serial(const HypothesisSpace& space, const RealMatrix& weights,
                                        const RadarVariables& vars, const MeasurementContext& ctx);

} // namespace rhsradar

#endif

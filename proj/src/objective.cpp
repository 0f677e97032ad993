#include "rhsradar/objective.hpp"

#include "rhsradar/errors.hpp"
#include "rhsradar/numerics.hpp"

#include <cstdint>
#include <stdexcept>
#include <utility>

namespace rhsradar {

namespace {

struct PairList {
    std::vector<std::pair<int, int>> index;
    std::vector<double> weight;

    std::size_t size() const { return index.size(); }
};

// Upper-triangle pairs with nonzero weight, in a fixed row-major order. Both
// the serial and the parallel paths accumulate contributions in this order,
// so their results match bit for bit.
PairList positive_pairs(const RealMatrix& weights, Eigen::Index n_items) {
    if (weights.rows() != n_items || weights.cols() != n_items)
        throw std::invalid_argument("weight table size does not match the item count");
    PairList pairs;
    for (Eigen::Index a = 0; a < n_items; ++a) {
        for (Eigen::Index b = a + 1; b < n_items; ++b) {
            const double w = weights(a, b);
            if (w < 0.0)
                throw std::invalid_argument("pair weights must be nonnegative");
            if (w > 0.0) {
                pairs.index.emplace_back(static_cast<int>(a), static_cast<int>(b));
                pairs.weight.push_back(w);
            }
        }
    }
    return pairs;
}

void check_forms_inputs(const HypothesisSpace& space, const RadarVariables& vars,
                        const MeasurementContext& ctx) {
    if (static_cast<int>(ctx.grid_directions.size()) != space.n_grids)
        throw std::invalid_argument("hypothesis space does not match the grid layout");
    if (ctx.tx_snapshots != ctx.rx_snapshots)
        throw std::invalid_argument("transmit and receive snapshot counts must match");
    if (vars.waveform.n_feeds() != ctx.tx_geometry.n_feeds())
        throw std::invalid_argument("waveform feed count does not match the transmit surface");
    if (vars.waveform.n_snapshots() != ctx.tx_snapshots)
        throw std::invalid_argument("waveform snapshot count does not match the context");
    if (vars.tx_amplitudes.values.size() != ctx.tx_geometry.n_elements() ||
        !vars.tx_amplitudes.in_box(1e-12))
        throw std::invalid_argument("transmit amplitudes invalid");
    if (vars.rx_amplitudes.values.size() != ctx.rx_geometry.n_elements() ||
        !vars.rx_amplitudes.in_box(1e-12))
        throw std::invalid_argument("receive amplitudes invalid");
}

// Steering vectors and assumed reflection per angular grid.
struct GridTerms {
    std::vector<ComplexVector> tx_steer;
    std::vector<ComplexVector> rx_steer;
    ComplexVector beta;
};

GridTerms grid_terms(const MeasurementContext& ctx) {
    GridTerms terms;
    const std::size_t n = ctx.grid_directions.size();
    terms.tx_steer.reserve(n);
    terms.rx_steer.reserve(n);
    terms.beta = ComplexVector::Ones(static_cast<Eigen::Index>(n));
    for (std::size_t g = 0; g < n; ++g) {
        terms.tx_steer.push_back(steering_vector(ctx.tx_geometry, ctx.grid_directions[g], ctx.wavelength));
        terms.rx_steer.push_back(steering_vector(ctx.rx_geometry, ctx.grid_directions[g], ctx.wavelength));
        if (ctx.grid_reflection.size() > 0)
            terms.beta(static_cast<Eigen::Index>(g)) = ctx.grid_reflection(static_cast<Eigen::Index>(g));
    }
    return terms;
}

double objective_impl(const std::vector<ComplexVector>& signals, const RealMatrix& weights,
                      const NoiseCovariance& noise, bool parallel) {
    PairList pairs = positive_pairs(weights, static_cast<Eigen::Index>(signals.size()));
    std::vector<double> contribution(pairs.size());
    const auto compute = [&](std::size_t p) {
        const auto [a, b] = pairs.index[p];
        return pairs.weight[p] *
               noise.quadratic_inverse_form(signals[static_cast<std::size_t>(a)],
                                            signals[static_cast<std::size_t>(b)]);
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t p = 0; p < static_cast<std::int64_t>(pairs.size()); ++p)
            contribution[static_cast<std::size_t>(p)] = compute(static_cast<std::size_t>(p));
    } else {
        for (std::size_t p = 0; p < pairs.size(); ++p)
            contribution[p] = compute(p);
    }
    double total = 0.0;
    for (double c : contribution)
        total += c;
    return total;
}

WaveformForms waveform_forms_impl(const HypothesisSpace& space, const RealMatrix& weights,
                                  const RadarVariables& vars, const MeasurementContext& ctx,
                                  bool parallel) {
    check_forms_inputs(space, vars, ctx);
    const ComplexMatrix tx_transfer = ctx.tx_propagation.transfer(); // N_t x L_t
    const ComplexMatrix rx_transfer = ctx.rx_propagation.transfer(); // N_r x L_r
    const Eigen::Index n_tx_feeds = tx_transfer.cols();
    const Eigen::Index snapshots = ctx.tx_snapshots;

    NoiseCovariance cov =
        noise_covariance(vars.rx_amplitudes, ctx.rx_propagation, ctx.noise_power, ctx.rx_snapshots);
    const RealVector inv_var = cov.feed_variances.cwiseInverse();

    GridTerms grids = grid_terms(ctx);
    // Per-grid coupling between one feed-signal snapshot and one received
    // snapshot: beta * (rx transfer^T Psi_r a_r) (Pt^T Psi_t a_t)^T.
    std::vector<ComplexVector> feed_gain, tx_gain;
    for (int g = 0; g < space.n_grids; ++g) {
        const auto gu = static_cast<std::size_t>(g);
        feed_gain.push_back(rx_transfer.transpose() *
                            (vars.rx_amplitudes.values.asDiagonal() * grids.rx_steer[gu]));
        tx_gain.push_back(tx_transfer.transpose() *
                          (vars.tx_amplitudes.values.asDiagonal() * grids.tx_steer[gu]));
    }
    std::vector<ComplexMatrix> coupling(space.hypotheses.size());
    for (std::size_t j = 0; j < space.hypotheses.size(); ++j) {
        ComplexMatrix t = ComplexMatrix::Zero(rx_transfer.cols(), n_tx_feeds);
        for (int g : space.hypotheses[j])
            t.noalias() += grids.beta(g) * feed_gain[static_cast<std::size_t>(g)] *
                           tx_gain[static_cast<std::size_t>(g)].transpose();
        coupling[j] = std::move(t);
    }

    PairList pairs = positive_pairs(weights, space.size());
    std::vector<ComplexMatrix> contribution(pairs.size());
    const auto compute = [&](std::size_t p) -> ComplexMatrix {
        const auto [a, b] = pairs.index[p];
        ComplexMatrix delta =
            coupling[static_cast<std::size_t>(a)] - coupling[static_cast<std::size_t>(b)];
        return pairs.weight[p] * (delta.adjoint() * inv_var.asDiagonal() * delta);
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t p = 0; p < static_cast<std::int64_t>(pairs.size()); ++p)
            contribution[static_cast<std::size_t>(p)] = compute(static_cast<std::size_t>(p));
    } else {
        for (std::size_t p = 0; p < pairs.size(); ++p)
            contribution[p] = compute(p);
    }
    ComplexMatrix block = ComplexMatrix::Zero(n_tx_feeds, n_tx_feeds);
    for (const ComplexMatrix& c : contribution)
        block += c;
    block = 0.5 * (block + block.adjoint()).eval();

    ComplexMatrix weighted_transfer = vars.tx_amplitudes.values.asDiagonal() * tx_transfer;
    ComplexMatrix power_block = weighted_transfer.adjoint() * weighted_transfer;

    WaveformForms forms;
    forms.R = kron(ComplexMatrix::Identity(snapshots, snapshots), block);
    forms.S = kron(ComplexMatrix::Identity(snapshots, snapshots), power_block);
    return forms;
}

TransmitForms transmit_forms_impl(const HypothesisSpace& space, const RealMatrix& weights,
                                  const RadarVariables& vars, const MeasurementContext& ctx,
                                  bool parallel) {
    check_forms_inputs(space, vars, ctx);
    const ComplexMatrix tx_transfer = ctx.tx_propagation.transfer();
    const ComplexMatrix rx_transfer = ctx.rx_propagation.transfer();
    const Eigen::Index n_tx = ctx.tx_geometry.n_elements();
    const Eigen::Index snapshots = ctx.tx_snapshots;

    NoiseCovariance cov =
        noise_covariance(vars.rx_amplitudes, ctx.rx_propagation, ctx.noise_power, ctx.rx_snapshots);
    const RealVector inv_var = cov.feed_variances.cwiseInverse();

    GridTerms grids = grid_terms(ctx);
    const ComplexMatrix fed = tx_transfer * vars.waveform.signals; // N_t x I_t, before Psi_t

    std::vector<ComplexVector> feed_gain;
    std::vector<ComplexMatrix> element_mix; // per grid: a_t o fed columns
    for (int g = 0; g < space.n_grids; ++g) {
        const auto gu = static_cast<std::size_t>(g);
        feed_gain.push_back(rx_transfer.transpose() *
                            (vars.rx_amplitudes.values.asDiagonal() * grids.rx_steer[gu]));
        element_mix.push_back(grids.tx_steer[gu].asDiagonal() * fed);
    }
    // Per (hypothesis, snapshot): the map from transmit amplitudes to the
    // received snapshot column.
    std::vector<std::vector<ComplexMatrix>> to_snapshot(space.hypotheses.size());
    for (std::size_t j = 0; j < space.hypotheses.size(); ++j) {
        to_snapshot[j].assign(static_cast<std::size_t>(snapshots),
                              ComplexMatrix::Zero(rx_transfer.cols(), n_tx));
        for (int g : space.hypotheses[j]) {
            const auto gu = static_cast<std::size_t>(g);
            for (Eigen::Index i = 0; i < snapshots; ++i)
                to_snapshot[j][static_cast<std::size_t>(i)].noalias() +=
                    grids.beta(g) * feed_gain[gu] * element_mix[gu].col(i).transpose();
        }
    }

    PairList pairs = positive_pairs(weights, space.size());
    std::vector<ComplexMatrix> contribution(pairs.size());
    const auto compute = [&](std::size_t p) -> ComplexMatrix {
        const auto [a, b] = pairs.index[p];
        ComplexMatrix sum = ComplexMatrix::Zero(n_tx, n_tx);
        for (Eigen::Index i = 0; i < snapshots; ++i) {
            ComplexMatrix delta = to_snapshot[static_cast<std::size_t>(a)][static_cast<std::size_t>(i)] -
                                  to_snapshot[static_cast<std::size_t>(b)][static_cast<std::size_t>(i)];
            sum.noalias() += delta.adjoint() * inv_var.asDiagonal() * delta;
        }
        return pairs.weight[p] * sum;
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t p = 0; p < static_cast<std::int64_t>(pairs.size()); ++p)
            contribution[static_cast<std::size_t>(p)] = compute(static_cast<std::size_t>(p));
    } else {
        for (std::size_t p = 0; p < pairs.size(); ++p)
            contribution[p] = compute(p);
    }
    TransmitForms forms;
    forms.R = ComplexMatrix::Zero(n_tx, n_tx);
    for (const ComplexMatrix& c : contribution)
        forms.R += c;
    forms.R = 0.5 * (forms.R + forms.R.adjoint()).eval();
    forms.S_diag = fed.rowwise().squaredNorm();
    return forms;
}

ReceiveForms receive_forms_impl(const HypothesisSpace& space, const RealMatrix& weights,
                                const RadarVariables& vars, const MeasurementContext& ctx,
                                bool parallel) {
    check_forms_inputs(space, vars, ctx);
    const ComplexMatrix tx_transfer = ctx.tx_propagation.transfer();
    const ComplexMatrix rx_transfer = ctx.rx_propagation.transfer();
    const Eigen::Index n_rx = ctx.rx_geometry.n_elements();
    const Eigen::Index n_rx_feeds = rx_transfer.cols();
    const Eigen::Index snapshots = ctx.tx_snapshots;

    GridTerms grids = grid_terms(ctx);
    const ComplexMatrix radiated =
        vars.tx_amplitudes.values.asDiagonal() * (tx_transfer * vars.waveform.signals);

    // Noise-free incident element signal per hypothesis.
    std::vector<ComplexMatrix> incident(space.hypotheses.size());
    for (std::size_t j = 0; j < space.hypotheses.size(); ++j) {
        ComplexMatrix c = ComplexMatrix::Zero(n_rx, snapshots);
        for (int g : space.hypotheses[j]) {
            const auto gu = static_cast<std::size_t>(g);
            c.noalias() += grids.beta(g) * grids.rx_steer[gu] *
                           (grids.tx_steer[gu].transpose() * radiated);
        }
        incident[j] = std::move(c);
    }

    PairList pairs = positive_pairs(weights, space.size());
    std::vector<std::vector<ComplexMatrix>> contribution(pairs.size());
    const auto compute = [&](std::size_t p) {
        const auto [a, b] = pairs.index[p];
        ComplexMatrix delta =
            incident[static_cast<std::size_t>(a)] - incident[static_cast<std::size_t>(b)];
        std::vector<ComplexMatrix> per_feed(static_cast<std::size_t>(n_rx_feeds),
                                            ComplexMatrix::Zero(n_rx, n_rx));
        for (Eigen::Index l = 0; l < n_rx_feeds; ++l) {
            for (Eigen::Index i = 0; i < snapshots; ++i) {
                ComplexVector z = rx_transfer.col(l).cwiseProduct(delta.col(i));
                per_feed[static_cast<std::size_t>(l)].noalias() += z * z.adjoint();
            }
            per_feed[static_cast<std::size_t>(l)] *= pairs.weight[p];
        }
        return per_feed;
    };
    if (parallel) {
#pragma omp parallel for schedule(static)
        for (std::int64_t p = 0; p < static_cast<std::int64_t>(pairs.size()); ++p)
            contribution[static_cast<std::size_t>(p)] = compute(static_cast<std::size_t>(p));
    } else {
        for (std::size_t p = 0; p < pairs.size(); ++p)
            contribution[p] = compute(p);
    }

    ReceiveForms forms;
    forms.R.assign(static_cast<std::size_t>(n_rx_feeds), ComplexMatrix::Zero(n_rx, n_rx));
    for (const auto& per_feed : contribution)
        for (Eigen::Index l = 0; l < n_rx_feeds; ++l)
            forms.R[static_cast<std::size_t>(l)] += per_feed[static_cast<std::size_t>(l)];
    for (Eigen::Index l = 0; l < n_rx_feeds; ++l) {
        ComplexMatrix& r = forms.R[static_cast<std::size_t>(l)];
        r = 0.5 * (r + r.adjoint()).eval();
        forms.S_diag.push_back(ctx.noise_power *
                               ctx.rx_propagation.attenuation.col(l).array().square().matrix());
    }
    return forms;
}

} // namespace

RealMatrix weight_table(const RealVector& priors) {
    if ((priors.array() < 0.0).any())
        throw std::invalid_argument("priors must be nonnegative");
    RealMatrix table = priors * priors.transpose();
    table.diagonal().setZero();
    return table;
}

double pairwise_distance(const ComplexVector& a, const ComplexVector& b,
                         const NoiseCovariance& noise) {
    return noise.quadratic_inverse_form(a, b);
}

double weighted_objective(const std::vector<ComplexVector>& signals, const RealMatrix& weights,
                          const NoiseCovariance& noise) {
    return objective_impl(signals, weights, noise, true);
}

double weighted_objective_serial(const std::vector<ComplexVector>& signals,
                                 const RealMatrix& weights, const NoiseCovariance& noise) {
    return objective_impl(signals, weights, noise, false);
}

double weighted_objective(const HypothesisSpace& space, const RadarVariables& vars,
                          const MeasurementContext& ctx) {
    std::vector<ComplexVector> signals = effective_signals(space.hypotheses, vars, ctx);
    NoiseCovariance noise =
        noise_covariance(vars.rx_amplitudes, ctx.rx_propagation, ctx.noise_power, ctx.rx_snapshots);
    return weighted_objective(signals, weight_table(space.priors), noise);
}

WaveformForms build_waveform_forms(const HypothesisSpace& space, const RealMatrix& weights,
                                   const RadarVariables& vars, const MeasurementContext& ctx) {
    return waveform_forms_impl(space, weights, vars, ctx, true);
}

WaveformForms build_waveform_forms_serial(const HypothesisSpace& space, const RealMatrix& weights,
                                          const RadarVariables& vars,
                                          const MeasurementContext& ctx) {
    return waveform_forms_impl(space, weights, vars, ctx, false);
}

TransmitForms build_transmit_forms(const HypothesisSpace& space, const RealMatrix& weights,
                                   const RadarVariables& vars, const MeasurementContext& ctx) {
    return transmit_forms_impl(space, weights, vars, ctx, true);
}

TransmitForms build_transmit_forms_serial(const HypothesisSpace& space, const RealMatrix& weights,
                                          const RadarVariables& vars,
                                          const MeasurementContext& ctx) {
    return transmit_forms_impl(space, weights, vars, ctx, false);
}

ReceiveForms build_receive_forms(const HypothesisSpace& space, const RealMatrix& weights,
                                 const RadarVariables& vars, const MeasurementContext& ctx) {
    return receive_forms_impl(space, weights, vars, ctx, true);
}

ReceiveForms build_receive_forms_serial(const HypothesisSpace& space, const RealMatrix& weights,
                                        const RadarVariables& vars, const MeasurementContext& ctx) {
    return receive_forms_impl(space, weights, vars, ctx, false);
}

} // namespace rhsradar

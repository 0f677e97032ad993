#include "rhsradar/baseline.hpp"

#include "rhsradar/errors.hpp"
#include "rhsradar/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace rhsradar {

namespace {

ComplexVector weights_from(const RealVector& phases, double gain) {
    ComplexVector w(phases.size());
    for (Eigen::Index i = 0; i < phases.size(); ++i)
        w(i) = std::polar(gain, phases(i));
    return w;
}

void check_model(const PhasedArrayModel& model, const MeasurementContext& ctx) {
    if (model.feed_gain <= 0.0 || model.feed_gain > 1.0)
        throw std::invalid_argument("feed gain must lie in (0, 1]");
    if (model.tx_phases.size() != model.tx_geometry.n_elements() ||
        model.rx_phases.size() != model.rx_geometry.n_elements())
        throw std::invalid_argument("phase vector length does not match the array");
    if (ctx.grid_directions.empty())
        throw std::invalid_argument("no angular grids configured");
}

// beta * (w_r^T a_r)(a_t^T w_t) per grid.
ComplexVector grid_couplings(const PhasedArrayModel& model, const MeasurementContext& ctx) {
    const ComplexVector wt = model.tx_weights();
    const ComplexVector wr = model.rx_weights();
    ComplexVector c(static_cast<Eigen::Index>(ctx.grid_directions.size()));
    for (Eigen::Index g = 0; g < c.size(); ++g) {
        const Direction& dir = ctx.grid_directions[static_cast<std::size_t>(g)];
        ComplexVector a_r = steering_vector(model.rx_geometry, dir, ctx.wavelength);
        ComplexVector a_t = steering_vector(model.tx_geometry, dir, ctx.wavelength);
        Complex beta = ctx.grid_reflection.size() > 0 ? ctx.grid_reflection(g) : Complex(1.0, 0.0);
        c(g) = beta * wr.cwiseProduct(a_r).sum() * a_t.cwiseProduct(wt).sum();
    }
    return c;
}

} // namespace

ComplexVector PhasedArrayModel::tx_weights() const {
    return weights_from(tx_phases, feed_gain);
}

ComplexVector PhasedArrayModel::rx_weights() const {
    return weights_from(rx_phases, feed_gain);
}

ComplexVector pa_couplings(const HypothesisSpace& space, const PhasedArrayModel& model,
                           const MeasurementContext& ctx) {
    check_model(model, ctx);
    if (static_cast<int>(ctx.grid_directions.size()) != space.n_grids)
        throw std::invalid_argument("hypothesis space does not match the grid layout");
    const ComplexVector per_grid = grid_couplings(model, ctx);
    ComplexVector c = ComplexVector::Zero(space.size());
    for (Eigen::Index j = 0; j < space.size(); ++j)
        for (int g : space.hypotheses[static_cast<std::size_t>(j)])
            c(j) += per_grid(g);
    return c;
}

ComplexVector pa_effective_signal(const std::vector<int>& grid_indices,
                                  const ComplexVector& waveform, const PhasedArrayModel& model,
                                  const MeasurementContext& ctx) {
    check_model(model, ctx);
    const ComplexVector per_grid = grid_couplings(model, ctx);
    Complex c(0.0, 0.0);
    for (int g : grid_indices) {
        if (g < 0 || g >= per_grid.size())
            throw std::invalid_argument("grid index out of range");
        c += per_grid(g);
    }
    return c * waveform;
}

NoiseCovariance pa_noise_covariance(const PhasedArrayModel& model, const MeasurementContext& ctx) {
    if (ctx.noise_power <= 0.0)
        throw std::invalid_argument("noise power must be positive");
    NoiseCovariance cov;
    cov.snapshots = ctx.rx_snapshots;
    cov.feed_variances = RealVector::Constant(
        1, ctx.noise_power * model.feed_gain * model.feed_gain *
               static_cast<double>(model.rx_geometry.n_elements()));
    return cov;
}

double pa_transmit_power(const PhasedArrayModel& model, const ComplexVector& waveform) {
    return model.feed_gain * model.feed_gain *
           static_cast<double>(model.tx_geometry.n_elements()) * waveform.squaredNorm();
}

ComplexVector pa_simulate_measurement(const Scene& scene, const ComplexVector& waveform,
                                      const PhasedArrayModel& model,
                                      const MeasurementContext& ctx, Rng& rng) {
    check_model(model, ctx);
    if (waveform.size() != ctx.rx_snapshots)
        throw std::invalid_argument("waveform length does not match the snapshot count");
    const ComplexVector wt = model.tx_weights();
    const ComplexVector wr = model.rx_weights();
    Complex c(0.0, 0.0);
    for (const Target& target : scene.targets) {
        ComplexVector a_r = steering_vector(model.rx_geometry, target.direction, ctx.wavelength);
        ComplexVector a_t = steering_vector(model.tx_geometry, target.direction, ctx.wavelength);
        c += target.reflection * wr.cwiseProduct(a_r).sum() * a_t.cwiseProduct(wt).sum();
    }
    ComplexVector y = c * waveform;
    for (Eigen::Index i = 0; i < y.size(); ++i) {
        Complex combined(0.0, 0.0);
        for (Eigen::Index n = 0; n < model.rx_geometry.n_elements(); ++n)
            combined += wr(n) * rng.complex_normal(ctx.noise_power);
        y(i) += combined;
    }
    return y;
}

double pa_objective(const HypothesisSpace& space, const PhasedArrayModel& model,
                    const ComplexVector& waveform, const MeasurementContext& ctx) {
    const ComplexVector c = pa_couplings(space, model, ctx);
    std::vector<ComplexVector> signals;
    signals.reserve(static_cast<std::size_t>(space.size()));
    for (Eigen::Index j = 0; j < space.size(); ++j)
        signals.push_back(c(j) * waveform);
    return weighted_objective_serial(signals, weight_table(space.priors),
                                     pa_noise_covariance(model, ctx));
}

PaOptimizationResult pa_initial(const HypothesisSpace& space, const PhasedArrayModel& model,
                                const MeasurementContext& ctx, double power_max, Rng& rng) {
    if (power_max <= 0.0)
        throw std::invalid_argument("power bound must be positive");
    PaOptimizationResult out;
    out.model = model;
    out.model.tx_phases.resize(model.tx_geometry.n_elements());
    out.model.rx_phases.resize(model.rx_geometry.n_elements());
    constexpr double kTwoPi = 6.283185307179586476925286766559;
    for (Eigen::Index n = 0; n < out.model.tx_phases.size(); ++n)
        out.model.tx_phases(n) = kTwoPi * rng.uniform();
    for (Eigen::Index n = 0; n < out.model.rx_phases.size(); ++n)
        out.model.rx_phases(n) = kTwoPi * rng.uniform();

    out.waveform.resize(ctx.tx_snapshots);
    for (Eigen::Index i = 0; i < out.waveform.size(); ++i)
        out.waveform(i) = rng.complex_normal(1.0);
    const double power = pa_transmit_power(out.model, out.waveform);
    if (!(power > 0.0))
        throw NumericalError("initial waveform radiates no power");
    out.waveform *= std::sqrt(power_max / power);
    out.objective = pa_objective(space, out.model, out.waveform, ctx);
    return out;
}

PaOptimizationResult pa_optimize(const HypothesisSpace& space, const MeasurementContext& ctx,
                                 const SolverConfig& cfg, const PaOptimizationResult& init) {
    if (cfg.power_max <= 0.0 || cfg.tol_outer <= 0.0 || cfg.max_outer < 1)
        throw std::invalid_argument("invalid solver configuration");
    check_model(init.model, ctx);
    if (init.waveform.size() != ctx.tx_snapshots)
        throw std::invalid_argument("waveform length does not match the snapshot count");

    const RealMatrix weights = weight_table(space.priors);
    const double noise_var = pa_noise_covariance(init.model, ctx).feed_variances(0);
    const Eigen::Index n_snapshots = init.waveform.size();

    PaOptimizationResult current = init;
    current.objective = pa_objective(space, current.model, current.waveform, ctx);
    current.iterations = 0;

    const auto consider = [&](PhasedArrayModel model, ComplexVector waveform) {
        const double value = pa_objective(space, model, waveform, ctx);
        if (!cfg.safeguard || value >= current.objective) {
            current.model = std::move(model);
            current.waveform = std::move(waveform);
            current.objective = value;
        }
    };

    // Pairwise-difference forms over hypothesis couplings; used by both phase
    // steps with their respective per-hypothesis vectors.
    const auto pairwise_form = [&](const std::vector<ComplexVector>& per_hyp) {
        const Eigen::Index n = per_hyp.front().size();
        ComplexMatrix form = ComplexMatrix::Zero(n, n);
        for (Eigen::Index a = 0; a < space.size(); ++a)
            for (Eigen::Index b = a + 1; b < space.size(); ++b) {
                if (weights(a, b) <= 0.0)
                    continue;
                ComplexVector delta = per_hyp[static_cast<std::size_t>(a)] -
                                      per_hyp[static_cast<std::size_t>(b)];
                form.noalias() += weights(a, b) * (delta.conjugate() * delta.transpose());
            }
        return form;
    };

    const auto phases_of = [](const ComplexVector& v) {
        RealVector phases(v.size());
        for (Eigen::Index n = 0; n < v.size(); ++n)
            phases(n) = std::arg(v(n));
        return phases;
    };

    for (int it = 1; it <= cfg.max_outer; ++it) {
        const double before = current.objective;

        // Waveform: the objective and power forms are both isotropic in x, so
        // the eigen step amounts to a full-power point.
        {
            const ComplexVector c = pa_couplings(space, current.model, ctx);
            double kappa = 0.0;
            for (Eigen::Index a = 0; a < space.size(); ++a)
                for (Eigen::Index b = a + 1; b < space.size(); ++b)
                    kappa += weights(a, b) * std::norm(c(a) - c(b));
            kappa /= noise_var;
            ComplexMatrix obj_form =
                kappa * ComplexMatrix::Identity(n_snapshots, n_snapshots);
            ComplexMatrix power_form =
                current.model.feed_gain * current.model.feed_gain *
                static_cast<double>(current.model.tx_geometry.n_elements()) *
                ComplexMatrix::Identity(n_snapshots, n_snapshots);
            WaveformSolution xs = solve_waveform(obj_form, power_form, cfg.power_max, 1);
            if (xs.flat)
                current.flat = true;
            consider(current.model, xs.waveform.signals.row(0).transpose());
        }

        // Transmit phases: eigen step on the form over a_t directions, then
        // keep only the phases (constant-modulus projection).
        {
            const ComplexVector wr = current.model.rx_weights();
            std::vector<ComplexVector> per_hyp;
            std::vector<ComplexVector> grid_vec;
            for (int g = 0; g < space.n_grids; ++g) {
                const Direction& dir = ctx.grid_directions[static_cast<std::size_t>(g)];
                ComplexVector a_r = steering_vector(current.model.rx_geometry, dir, ctx.wavelength);
                ComplexVector a_t = steering_vector(current.model.tx_geometry, dir, ctx.wavelength);
                Complex beta =
                    ctx.grid_reflection.size() > 0 ? ctx.grid_reflection(g) : Complex(1.0, 0.0);
                grid_vec.push_back(beta * wr.cwiseProduct(a_r).sum() * a_t);
            }
            for (std::size_t j = 0; j < space.hypotheses.size(); ++j) {
                ComplexVector m =
                    ComplexVector::Zero(current.model.tx_geometry.n_elements());
                for (int g : space.hypotheses[j])
                    m += grid_vec[static_cast<std::size_t>(g)];
                per_hyp.push_back(std::move(m));
            }
            HermitianEig eig = eigh(pairwise_form(per_hyp));
            if (eig.values(0) > 0.0) {
                PhasedArrayModel cand = current.model;
                cand.tx_phases = phases_of(eig.vectors.col(0));
                consider(std::move(cand), current.waveform);
            } else {
                current.flat = true;
            }
        }

        // Receive phases: symmetric step with the roles swapped.
        {
            const ComplexVector wt = current.model.tx_weights();
            std::vector<ComplexVector> per_hyp;
            std::vector<ComplexVector> grid_vec;
            for (int g = 0; g < space.n_grids; ++g) {
                const Direction& dir = ctx.grid_directions[static_cast<std::size_t>(g)];
                ComplexVector a_r = steering_vector(current.model.rx_geometry, dir, ctx.wavelength);
                ComplexVector a_t = steering_vector(current.model.tx_geometry, dir, ctx.wavelength);
                Complex beta =
                    ctx.grid_reflection.size() > 0 ? ctx.grid_reflection(g) : Complex(1.0, 0.0);
                grid_vec.push_back(beta * a_t.cwiseProduct(wt).sum() * a_r);
            }
            for (std::size_t j = 0; j < space.hypotheses.size(); ++j) {
                ComplexVector m =
                    ComplexVector::Zero(current.model.rx_geometry.n_elements());
                for (int g : space.hypotheses[j])
                    m += grid_vec[static_cast<std::size_t>(g)];
                per_hyp.push_back(std::move(m));
            }
            HermitianEig eig = eigh(pairwise_form(per_hyp));
            if (eig.values(0) > 0.0) {
                PhasedArrayModel cand = current.model;
                cand.rx_phases = phases_of(eig.vectors.col(0));
                consider(std::move(cand), current.waveform);
            } else {
                current.flat = true;
            }
        }

        current.iterations = it;
        if (std::abs(current.objective - before) <=
            cfg.tol_outer * std::max(1.0, std::abs(before)))
            break;
    }
    return current;
}

} // namespace rhsradar

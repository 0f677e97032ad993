#include "rhsradar/optimizer.hpp"

#include "rhsradar/errors.hpp"
#include "rhsradar/numerics.hpp"

#include <cmath>
#include <stdexcept>

namespace rhsradar {

namespace {

constexpr double kSpectrumTol = 1e-10; // relative cutoff for pseudo-inverted spectra

void check_solver_config(const SolverConfig& cfg) {
    if (cfg.power_max <= 0.0)
        throw std::invalid_argument("power bound must be positive");
    if (cfg.tol_outer <= 0.0 || cfg.tol_fp <= 0.0)
        throw std::invalid_argument("solver tolerances must be positive");
    if (cfg.max_outer < 1 || cfg.max_fp < 1)
        throw std::invalid_argument("iteration caps must be at least 1");
}

RealVector pseudo_inv_sqrt(const RealVector& values) {
    RealVector out = RealVector::Zero(values.size());
    const double peak = values.maxCoeff();
    if (peak <= 0.0)
        return out;
    for (Eigen::Index i = 0; i < values.size(); ++i)
        if (values(i) > kSpectrumTol * peak)
            out(i) = 1.0 / std::sqrt(values(i));
    return out;
}

double denominator(const AmplitudeVector& psi, const RealVector& noise_diag) {
    return psi.values.array().square().matrix().dot(noise_diag);
}

} // namespace

double transmit_power(const RadarVariables& vars, const MeasurementContext& ctx) {
    return transmit(vars.waveform, vars.tx_amplitudes, ctx.tx_propagation).squaredNorm();
}

WaveformSolution solve_waveform(const ComplexMatrix& R, const ComplexMatrix& S, double power_max,
                                Eigen::Index n_feeds) {
    if (power_max <= 0.0)
        throw std::invalid_argument("power bound must be positive");
    if (R.rows() != R.cols() || S.rows() != S.cols() || R.rows() != S.rows())
        throw std::invalid_argument("waveform form dimensions disagree");
    if (n_feeds < 1 || R.rows() % n_feeds != 0)
        throw std::invalid_argument("feed count does not divide the stacked dimension");

    HermitianEig power_eig = eigh(S);
    if (!(power_eig.values(0) > 0.0))
        throw NumericalError("transmit power form is identically zero");
    const RealVector inv_sqrt = pseudo_inv_sqrt(power_eig.values);

    // Whiten by the power form, then take the top eigenvector of the
    // objective in whitened coordinates.
    ComplexMatrix whitened = inv_sqrt.asDiagonal() *
                             (power_eig.vectors.adjoint() * R * power_eig.vectors) *
                             inv_sqrt.asDiagonal();
    HermitianEig obj_eig = eigh(whitened);

    WaveformSolution solution;
    ComplexVector x;
    if (obj_eig.values(0) > 0.0) {
        x = std::sqrt(power_max) *
            (power_eig.vectors * (inv_sqrt.asDiagonal() * obj_eig.vectors.col(0)));
    } else {
        // Flat objective: any feasible point will do; use the dominant power
        // direction at full power.
        solution.flat = true;
        x = std::sqrt(power_max / power_eig.values(0)) * power_eig.vectors.col(0);
    }
    if (!x.allFinite())
        throw NumericalError("waveform solve produced non-finite values");
    solution.waveform = Waveform::from_stacked(x, n_feeds);
    return solution;
}

AmplitudeSolution solve_transmit(const ComplexMatrix& R, const RealVector& S_diag,
                                 double power_max) {
    if (power_max <= 0.0)
        throw std::invalid_argument("power bound must be positive");
    if (R.rows() != R.cols() || S_diag.size() != R.rows())
        throw std::invalid_argument("transmit form dimensions disagree");
    if ((S_diag.array() < 0.0).any())
        throw std::invalid_argument("power diagonal must be nonnegative");

    const auto flat_point = [&]() {
        AmplitudeSolution s;
        s.flat = true;
        const double total = S_diag.sum();
        const double scale = total > 0.0 ? std::min(1.0, std::sqrt(power_max / total)) : 1.0;
        s.amplitudes.values = RealVector::Constant(S_diag.size(), scale);
        return s;
    };

    const RealVector inv_sqrt = pseudo_inv_sqrt(S_diag);
    RealMatrix whitened = inv_sqrt.asDiagonal() * R.real() * inv_sqrt.asDiagonal();
    SymmetricEig eig = eigh_real(whitened);
    if (!(eig.values(0) > 0.0))
        return flat_point();

    // Keep whichever signed part of the top eigenvector carries more energy;
    // the result is entrywise nonnegative either way.
    const RealVector top = eig.vectors.col(0);
    RealVector positive = top.cwiseMax(0.0);
    RealVector negative = (-top).cwiseMax(0.0);
    RealVector part = positive.squaredNorm() >= negative.squaredNorm() ? positive : negative;

    RealVector direction = inv_sqrt.cwiseProduct(part);
    const double norm = direction.norm();
    if (!(norm > 0.0))
        return flat_point();
    direction /= norm;

    // One scale meets the box, the other the power bound; take the tighter.
    double scale = 1.0 / direction.maxCoeff();
    const double power = direction.cwiseProduct(S_diag.cwiseProduct(direction)).sum();
    if (power > 0.0)
        scale = std::min(scale, std::sqrt(power_max / power));

    AmplitudeSolution solution;
    solution.amplitudes.values = (scale * direction).cwiseMin(1.0).cwiseMax(0.0);
    return solution;
}

double sum_of_ratios(const AmplitudeVector& rx_amplitudes, const ReceiveForms& forms) {
    if (forms.R.size() != forms.S_diag.size() || forms.R.empty())
        throw std::invalid_argument("malformed receive forms");
    double total = 0.0;
    for (std::size_t l = 0; l < forms.R.size(); ++l) {
        const double denom = denominator(rx_amplitudes, forms.S_diag[l]);
        if (!(denom > 0.0))
            throw NumericalError("receive amplitudes give zero noise variance");
        total += rx_amplitudes.values.dot(forms.R[l].real() * rx_amplitudes.values) / denom;
    }
    return total;
}

ReceiveSpectral prepare_receive_spectral(const ReceiveForms& forms) {
    if (forms.R.size() != forms.S_diag.size() || forms.R.empty())
        throw std::invalid_argument("malformed receive forms");
    ReceiveSpectral spectral;
    for (std::size_t l = 0; l < forms.R.size(); ++l) {
        SymmetricEig eig = eigh_real(forms.R[l].real());
        spectral.basis.push_back(std::move(eig.vectors));
        spectral.gains.push_back(eig.values.cwiseMax(0.0));
        spectral.noise_diag.push_back(forms.S_diag[l]);
    }
    return spectral;
}

FpAuxiliary fp_xi_update(const AmplitudeVector& rx_amplitudes, const ReceiveSpectral& spectral) {
    FpAuxiliary aux;
    for (std::size_t l = 0; l < spectral.basis.size(); ++l) {
        const double denom = denominator(rx_amplitudes, spectral.noise_diag[l]);
        if (!(denom > 0.0))
            throw NumericalError("receive amplitudes give zero noise variance");
        RealVector projected = spectral.basis[l].transpose() * rx_amplitudes.values;
        RealVector xi = spectral.gains[l].cwiseProduct(projected) / denom;
        // Coordinates below the spectral cutoff carry no curvature; keep
        // their auxiliaries at zero so the surrogate stays bounded.
        const double peak = spectral.gains[l].maxCoeff();
        for (Eigen::Index i = 0; i < xi.size(); ++i)
            if (!(spectral.gains[l](i) > kSpectrumTol * peak))
                xi(i) = 0.0;
        aux.xi.push_back(std::move(xi));
    }
    return aux;
}

AmplitudeVector fp_psi_update(const FpAuxiliary& aux, const ReceiveSpectral& spectral,
                              const AmplitudeVector& current) {
    const Eigen::Index n = current.values.size();
    RealVector linear = RealVector::Zero(n);
    RealVector quad = RealVector::Zero(n);
    for (std::size_t l = 0; l < spectral.basis.size(); ++l) {
        linear += spectral.basis[l] * aux.xi[l];
        const double peak = spectral.gains[l].maxCoeff();
        double curvature = 0.0;
        for (Eigen::Index i = 0; i < aux.xi[l].size(); ++i)
            if (spectral.gains[l](i) > kSpectrumTol * peak)
                curvature += aux.xi[l](i) * aux.xi[l](i) / spectral.gains[l](i);
        quad += curvature * spectral.noise_diag[l];
    }
    // The surrogate is 2 b^T psi - psi^T diag(quad) psi: separable, so the
    // clipped per-coordinate maximizer is the exact box maximum.
    AmplitudeVector out;
    out.values.resize(n);
    for (Eigen::Index i = 0; i < n; ++i) {
        if (quad(i) > 0.0)
            out.values(i) = std::min(1.0, std::max(0.0, linear(i) / quad(i)));
        else if (linear(i) > 0.0)
            out.values(i) = 1.0;
        else if (linear(i) < 0.0)
            out.values(i) = 0.0;
        else
            out.values(i) = current.values(i);
    }
    return out;
}

double fp_surrogate(const AmplitudeVector& rx_amplitudes, const FpAuxiliary& aux,
                    const ReceiveSpectral& spectral) {
    double value = 0.0;
    for (std::size_t l = 0; l < spectral.basis.size(); ++l) {
        RealVector projected = spectral.basis[l].transpose() * rx_amplitudes.values;
        const double denom = denominator(rx_amplitudes, spectral.noise_diag[l]);
        const double peak = spectral.gains[l].maxCoeff();
        double curvature = 0.0;
        for (Eigen::Index i = 0; i < aux.xi[l].size(); ++i)
            if (spectral.gains[l](i) > kSpectrumTol * peak)
                curvature += aux.xi[l](i) * aux.xi[l](i) / spectral.gains[l](i);
        value += 2.0 * aux.xi[l].dot(projected) - denom * curvature;
    }
    return value;
}

AmplitudeVector solve_receive(const ReceiveForms& forms, const SolverConfig& cfg,
                              const AmplitudeVector& init) {
    check_solver_config(cfg);
    if (!init.in_box(1e-12))
        throw std::invalid_argument("receive amplitude start point outside [0, 1]");
    ReceiveSpectral spectral = prepare_receive_spectral(forms);

    AmplitudeVector psi = init;
    double value = sum_of_ratios(psi, forms);
    AmplitudeVector best = psi;
    double best_value = value;
    double previous = value;

    for (int it = 0; it < cfg.max_fp; ++it) {
        FpAuxiliary aux = fp_xi_update(psi, spectral);
        psi = fp_psi_update(aux, spectral, psi);
        bool degenerate = false;
        for (const RealVector& nd : spectral.noise_diag)
            if (!(denominator(psi, nd) > 0.0))
                degenerate = true;
        if (degenerate)
            break;
        const double current = sum_of_ratios(psi, forms);
        if (current > best_value) {
            best_value = current;
            best = psi;
        }
        if (std::abs(current - previous) <= cfg.tol_fp * std::max(1.0, std::abs(previous)))
            break;
        previous = current;
    }
    return best;
}

OptimizationVariables initial_variables(const HypothesisSpace& space,
                                        const MeasurementContext& ctx, double power_max,
                                        Rng& rng) {
    if (power_max <= 0.0)
        throw std::invalid_argument("power bound must be positive");
    RadarVariables vars;
    vars.tx_amplitudes.values = RealVector::Ones(ctx.tx_geometry.n_elements());
    vars.rx_amplitudes.values = RealVector::Ones(ctx.rx_geometry.n_elements());
    vars.waveform.signals.resize(ctx.tx_geometry.n_feeds(), ctx.tx_snapshots);
    for (Eigen::Index j = 0; j < vars.waveform.signals.cols(); ++j)
        for (Eigen::Index i = 0; i < vars.waveform.signals.rows(); ++i)
            vars.waveform.signals(i, j) = rng.complex_normal(1.0);
    const double power = transmit_power(vars, ctx);
    if (!(power > 0.0))
        throw NumericalError("initial waveform radiates no power");
    vars.waveform.signals *= std::sqrt(power_max / power);

    OptimizationVariables out;
    out.vars = std::move(vars);
    out.objective = weighted_objective(space, out.vars, ctx);
    return out;
}

OptimizationVariables waoa(const HypothesisSpace& space, const MeasurementContext& ctx,
                           const SolverConfig& cfg, const OptimizationVariables& init,
                           WaoaDiagnostics* diagnostics) {
    check_solver_config(cfg);
    const RealMatrix weights = weight_table(space.priors);

    OptimizationVariables current = init;
    current.objective = weighted_objective(space, current.vars, ctx);
    if (diagnostics) {
        *diagnostics = WaoaDiagnostics{};
        diagnostics->trace.push_back(current.objective);
    }

    const auto consider = [&](RadarVariables candidate) {
        const double value = weighted_objective(space, candidate, ctx);
        if (!cfg.safeguard || value >= current.objective) {
            current.vars = std::move(candidate);
            current.objective = value;
        }
    };

    for (int it = 1; it <= cfg.max_outer; ++it) {
        const double before = current.objective;

        WaveformForms wf = build_waveform_forms(space, weights, current.vars, ctx);
        WaveformSolution xs =
            solve_waveform(wf.R, wf.S, cfg.power_max, ctx.tx_geometry.n_feeds());
        if (diagnostics && xs.flat)
            diagnostics->flat_step = true;
        RadarVariables cand = current.vars;
        cand.waveform = xs.waveform;
        consider(std::move(cand));

        TransmitForms tf = build_transmit_forms(space, weights, current.vars, ctx);
        AmplitudeSolution ts = solve_transmit(tf.R, tf.S_diag, cfg.power_max);
        if (diagnostics && ts.flat)
            diagnostics->flat_step = true;
        cand = current.vars;
        cand.tx_amplitudes = ts.amplitudes;
        consider(std::move(cand));

        ReceiveForms rf = build_receive_forms(space, weights, current.vars, ctx);
        cand = current.vars;
        cand.rx_amplitudes = solve_receive(rf, cfg, current.vars.rx_amplitudes);
        consider(std::move(cand));

        if (diagnostics) {
            diagnostics->trace.push_back(current.objective);
            diagnostics->iterations = it;
        }
        if (std::abs(current.objective - before) <=
            cfg.tol_outer * std::max(1.0, std::abs(before)))
            return current;
    }
    if (diagnostics)
        diagnostics->hit_cap = true;
    return current;
}

} // namespace rhsradar

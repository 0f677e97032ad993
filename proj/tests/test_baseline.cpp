#include "doctest.h"
#include "helpers.hpp"

#include "rhsradar/baseline.hpp"
#include "rhsradar/harness.hpp"
#include "rhsradar/hypothesis.hpp"

#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

using namespace rhsradar;

namespace {

constexpr double kPi = 3.14159265358979323846;

// Small two-by-two arrays on both ends, one angular grid per test unless noted.
ExperimentConfig pa_config(int grids) {
    ExperimentConfig cfg;
    cfg.grids = grids;
    cfg.max_targets = 1;
    cfg.true_grids = {1};
    cfg.pa_elements = 4;
    return cfg;
}

Complex grid_coupling(const PhasedArrayModel& model, const MeasurementContext& ctx, int g) {
    const ComplexVector wt = model.tx_weights();
    const ComplexVector wr = model.rx_weights();
    const ComplexVector a_r = steering_vector(model.rx_geometry, ctx.grid_directions[g], ctx.wavelength);
    const ComplexVector a_t = steering_vector(model.tx_geometry, ctx.grid_directions[g], ctx.wavelength);
    return ctx.grid_reflection(g) * (wr.transpose() * a_r).value() *
           (a_t.transpose() * wt).value();
}

} // namespace

TEST_SUITE("baseline") {

TEST_CASE("weights have constant modulus equal to the feed gain") {
    PhasedArrayModel model;
    model.tx_geometry = build_planar_surface(2, 2, 0.005, 1);
    model.rx_geometry = build_planar_surface(2, 2, 0.005, 1);
    Rng rng(11);
    model.tx_phases = RealVector::NullaryExpr(4, [&](Eigen::Index) { return 7.0 * rng.uniform() - 3.0; });
    model.rx_phases = RealVector::NullaryExpr(4, [&](Eigen::Index) { return 7.0 * rng.uniform() - 3.0; });
    model.feed_gain = 0.9;

    const ComplexVector wt = model.tx_weights();
    const ComplexVector wr = model.rx_weights();
    for (Eigen::Index n = 0; n < 4; ++n) {
        CHECK(std::abs(wt(n)) == doctest::Approx(0.9).epsilon(1e-14));
        CHECK(std::abs(wr(n)) == doctest::Approx(0.9).epsilon(1e-14));
        CHECK(std::arg(wt(n)) == doctest::Approx(std::atan2(std::sin(model.tx_phases(n)),
                                                            std::cos(model.tx_phases(n))))
                                     .epsilon(1e-12));
    }
}

TEST_CASE("empty hypothesis couples to nothing") {
    const ExperimentConfig cfg = pa_config(2);
    const MeasurementContext ctx = make_context(cfg);
    const PhasedArrayModel model = make_phased_array(cfg);
    const HypothesisSpace space = enumerate_hypotheses(2, 1);

    const ComplexVector c = pa_couplings(space, model, ctx);
    CHECK(std::abs(c(0)) == 0.0); // first hypothesis is the empty one

    ComplexVector x(ctx.rx_snapshots);
    x.setConstant(Complex(1.0, -2.0));
    const ComplexVector u = pa_effective_signal({}, x, model, ctx);
    CHECK(u.size() == x.size());
    CHECK(u.norm() == 0.0);
}

TEST_CASE("couplings match the direct steering-product formula") {
    ExperimentConfig cfg = pa_config(3);
    cfg.max_targets = 2;
    const MeasurementContext ctx = make_context(cfg);
    PhasedArrayModel model = make_phased_array(cfg);
    Rng rng(23);
    for (Eigen::Index n = 0; n < model.tx_phases.size(); ++n) {
        model.tx_phases(n) = 2.0 * kPi * rng.uniform();
        model.rx_phases(n) = 2.0 * kPi * rng.uniform();
    }

    const HypothesisSpace space = enumerate_hypotheses(3, 2);
    const ComplexVector c = pa_couplings(space, model, ctx);
    REQUIRE(c.size() == space.size());
    for (Eigen::Index j = 0; j < space.size(); ++j) {
        Complex expected(0.0, 0.0);
        for (int g : space.hypotheses[static_cast<std::size_t>(j)])
            expected += grid_coupling(model, ctx, g);
        CHECK(std::abs(c(j) - expected) < 1e-12 * (1.0 + std::abs(expected)));
    }
}

TEST_CASE("single-element broadside chain scales the waveform by the squared gain") {
    ExperimentConfig cfg = pa_config(1);
    cfg.pa_elements = 1;
    cfg.grid_polar = 0.0; // broadside: unit steering entries on both ends
    const MeasurementContext ctx = make_context(cfg);
    PhasedArrayModel model = make_phased_array(cfg);
    model.tx_phases.setZero();
    model.rx_phases.setZero();

    ComplexVector x(ctx.rx_snapshots);
    for (Eigen::Index i = 0; i < x.size(); ++i)
        x(i) = Complex(0.3 * static_cast<double>(i) - 0.2, 0.5);
    const ComplexVector u = pa_effective_signal({0}, x, model, ctx);
    CHECK((u - 0.81 * x).norm() < 1e-14 * x.norm());
}

TEST_CASE("effective signal is linear in the grid reflections") {
    ExperimentConfig cfg = pa_config(2);
    cfg.max_targets = 2;
    MeasurementContext ctx = make_context(cfg);
    const PhasedArrayModel model = make_phased_array(cfg);
    Rng rng(31);
    const ComplexVector x = testutil::random_complex_vector(ctx.rx_snapshots, rng);

    const ComplexVector base = pa_effective_signal({0, 1}, x, model, ctx);
    const ComplexVector one = pa_effective_signal({0}, x, model, ctx);
    const ComplexVector two = pa_effective_signal({1}, x, model, ctx);
    CHECK((base - one - two).norm() < 1e-12 * (1.0 + base.norm()));

    MeasurementContext doubled = ctx;
    doubled.grid_reflection *= Complex(2.0, 0.0);
    const ComplexVector scaled = pa_effective_signal({0, 1}, x, model, doubled);
    CHECK((scaled - 2.0 * base).norm() < 1e-12 * (1.0 + base.norm()));
}

TEST_CASE("effective signals agree with the coupling vector") {
    ExperimentConfig cfg = pa_config(3);
    cfg.max_targets = 2;
    const MeasurementContext ctx = make_context(cfg);
    const PhasedArrayModel model = make_phased_array(cfg);
    const HypothesisSpace space = enumerate_hypotheses(3, 2);
    Rng rng(37);
    const ComplexVector x = testutil::random_complex_vector(ctx.rx_snapshots, rng);

    const ComplexVector c = pa_couplings(space, model, ctx);
    for (Eigen::Index j = 0; j < space.size(); ++j) {
        const ComplexVector u =
            pa_effective_signal(space.hypotheses[static_cast<std::size_t>(j)], x, model, ctx);
        CHECK((u - c(j) * x).norm() < 1e-12 * (1.0 + x.norm()));
    }
}

TEST_CASE("invalid models and grid indices are rejected") {
    const ExperimentConfig cfg = pa_config(2);
    const MeasurementContext ctx = make_context(cfg);
    const PhasedArrayModel model = make_phased_array(cfg);
    ComplexVector x = ComplexVector::Ones(ctx.rx_snapshots);

    CHECK_THROWS_AS(pa_effective_signal({5}, x, model, ctx), std::invalid_argument);

    PhasedArrayModel short_phases = model;
    short_phases.tx_phases = RealVector::Zero(2);
    CHECK_THROWS_AS(pa_effective_signal({0}, x, short_phases, ctx), std::invalid_argument);

    PhasedArrayModel bad_gain = model;
    bad_gain.feed_gain = 0.0;
    CHECK_THROWS_AS(pa_effective_signal({0}, x, bad_gain, ctx), std::invalid_argument);
    bad_gain.feed_gain = 1.5;
    CHECK_THROWS_AS(pa_effective_signal({0}, x, bad_gain, ctx), std::invalid_argument);
}

TEST_CASE("combined receive noise is white with the predicted variance") {
    ExperimentConfig cfg = pa_config(2);
    cfg.snapshots = 3;
    cfg.noise_power = 2.5;
    const MeasurementContext ctx = make_context(cfg);
    const PhasedArrayModel model = make_phased_array(cfg);

    const NoiseCovariance cov = pa_noise_covariance(model, ctx);
    CHECK(cov.feed_variances.size() == 1);
    CHECK(cov.snapshots == ctx.rx_snapshots);
    const double expected = 2.5 * 0.81 * 4.0;
    CHECK(cov.feed_variances(0) == doctest::Approx(expected).epsilon(1e-14));
    const ComplexMatrix dense = cov.dense();
    CHECK(dense.rows() == ctx.rx_snapshots);
    CHECK((dense - expected * ComplexMatrix::Identity(dense.rows(), dense.cols())).norm() <
          1e-12 * expected);
}

TEST_CASE("transmit power follows the single-chain formula") {
    const ExperimentConfig cfg = pa_config(1);
    const PhasedArrayModel model = make_phased_array(cfg);
    Rng rng(41);
    const ComplexVector x = testutil::random_complex_vector(4, rng);
    CHECK(pa_transmit_power(model, x) ==
          doctest::Approx(0.81 * 4.0 * x.squaredNorm()).epsilon(1e-14));
}

TEST_CASE("objective matches an explicit pairwise sum over couplings") {
    ExperimentConfig cfg = pa_config(3);
    cfg.max_targets = 2;
    cfg.noise_power = 1.7;
    const MeasurementContext ctx = make_context(cfg);
    PhasedArrayModel model = make_phased_array(cfg);
    Rng rng(43);
    for (Eigen::Index n = 0; n < model.tx_phases.size(); ++n) {
        model.tx_phases(n) = 2.0 * kPi * rng.uniform();
        model.rx_phases(n) = 2.0 * kPi * rng.uniform();
    }
    const HypothesisSpace space = enumerate_hypotheses(3, 2);
    const ComplexVector x = testutil::random_complex_vector(ctx.rx_snapshots, rng);

    // Covariance is a scalar multiple of the identity, so each pairwise term
    // is |c_a - c_b|^2 ||x||^2 / variance.
    const ComplexVector c = pa_couplings(space, model, ctx);
    const RealMatrix weights = weight_table(space.priors);
    const double variance = pa_noise_covariance(model, ctx).feed_variances(0);
    double expected = 0.0;
    for (Eigen::Index a = 0; a < space.size(); ++a)
        for (Eigen::Index b = 0; b < a; ++b)
            expected += weights(a, b) * std::norm(c(a) - c(b)) * x.squaredNorm() / variance;

    CHECK(pa_objective(space, model, x, ctx) ==
          doctest::Approx(expected).epsilon(1e-10));
}

TEST_CASE("simulated measurement reduces to the coupled waveform when noise vanishes") {
    ExperimentConfig cfg = pa_config(1);
    cfg.noise_power = 1e-30;
    const MeasurementContext ctx = make_context(cfg);
    const PhasedArrayModel model = make_phased_array(cfg);
    Rng rng(47);
    const ComplexVector x = testutil::random_complex_vector(ctx.rx_snapshots, rng);

    Scene scene = ctx.scene_of({0});
    Rng noise_rng(5);
    const ComplexVector y = pa_simulate_measurement(scene, x, model, ctx, noise_rng);
    const ComplexVector u = pa_effective_signal({0}, x, model, ctx);
    CHECK((y - u).norm() < 1e-10 * (1.0 + u.norm()));
}

TEST_CASE("simulated measurements are reproducible from the seed") {
    const ExperimentConfig cfg = pa_config(2);
    const MeasurementContext ctx = make_context(cfg);
    const PhasedArrayModel model = make_phased_array(cfg);
    Rng rng(53);
    const ComplexVector x = testutil::random_complex_vector(ctx.rx_snapshots, rng);
    Scene scene = ctx.scene_of({1});

    Rng r1(99), r2(99), r3(100);
    const ComplexVector y1 = pa_simulate_measurement(scene, x, model, ctx, r1);
    const ComplexVector y2 = pa_simulate_measurement(scene, x, model, ctx, r2);
    const ComplexVector y3 = pa_simulate_measurement(scene, x, model, ctx, r3);
    CHECK((y1 - y2).norm() == 0.0);
    CHECK((y1 - y3).norm() > 0.0);
}

TEST_CASE("initialization radiates exactly the power budget") {
    const ExperimentConfig cfg = pa_config(2);
    const MeasurementContext ctx = make_context(cfg);
    const PhasedArrayModel model = make_phased_array(cfg);
    const HypothesisSpace space = enumerate_hypotheses(2, 1);

    Rng rng(61);
    const PaOptimizationResult init = pa_initial(space, model, ctx, 12.5, rng);
    CHECK(pa_transmit_power(init.model, init.waveform) ==
          doctest::Approx(12.5).epsilon(1e-12));
    CHECK(init.objective ==
          doctest::Approx(pa_objective(space, init.model, init.waveform, ctx)).epsilon(1e-12));

    Rng twin(61);
    const PaOptimizationResult again = pa_initial(space, model, ctx, 12.5, twin);
    CHECK((again.waveform - init.waveform).norm() == 0.0);
    CHECK((again.model.tx_phases - init.model.tx_phases).norm() == 0.0);
}

TEST_CASE("alternating phase optimization never loses ground") {
    ExperimentConfig cfg = pa_config(2);
    cfg.max_targets = 2;
    const MeasurementContext ctx = make_context(cfg);
    const PhasedArrayModel model = make_phased_array(cfg);
    const HypothesisSpace space = enumerate_hypotheses(2, 2);
    SolverConfig solver;
    solver.power_max = 10.0;
    solver.max_outer = 6;

    for (unsigned long long seed = 0; seed < 5; ++seed) {
        Rng rng(Rng::derive(600, seed));
        const PaOptimizationResult init = pa_initial(space, model, ctx, solver.power_max, rng);
        const PaOptimizationResult out = pa_optimize(space, ctx, solver, init);
        CHECK(out.objective >= init.objective - 1e-12 * std::abs(init.objective));
        CHECK(out.iterations <= solver.max_outer);
        CHECK(pa_transmit_power(out.model, out.waveform) <= solver.power_max * (1.0 + 1e-9));

        // Restarting from the result must not regress either.
        const PaOptimizationResult chained = pa_optimize(space, ctx, solver, out);
        CHECK(chained.objective >= out.objective - 1e-12 * std::abs(out.objective));

        for (Eigen::Index n = 0; n < out.model.tx_phases.size(); ++n) {
            CHECK(std::abs(out.model.tx_weights()(n)) == doctest::Approx(0.9).epsilon(1e-12));
            CHECK(std::abs(out.model.rx_weights()(n)) == doctest::Approx(0.9).epsilon(1e-12));
        }
    }
}

TEST_CASE("single-direction optimization aligns phases with the steering vector") {
    // One grid and one occupied/empty pair: the pairwise form is rank one and
    // the optimal constant-modulus weights are the matched filter, so the
    // optimized phases must equal minus the steering phases up to one global
    // rotation on each end.
    const ExperimentConfig cfg = pa_config(1);
    const MeasurementContext ctx = make_context(cfg);
    const PhasedArrayModel model = make_phased_array(cfg);
    const HypothesisSpace space = enumerate_hypotheses(1, 1);
    SolverConfig solver;
    solver.power_max = 10.0;
    solver.max_outer = 10;

    Rng rng(71);
    const PaOptimizationResult init = pa_initial(space, model, ctx, solver.power_max, rng);
    const PaOptimizationResult out = pa_optimize(space, ctx, solver, init);

    const ComplexVector a_t = steering_vector(model.tx_geometry, ctx.grid_directions[0], ctx.wavelength);
    const ComplexVector a_r = steering_vector(model.rx_geometry, ctx.grid_directions[0], ctx.wavelength);
    const auto check_aligned = [](const RealVector& phases, const ComplexVector& steering) {
        // phases + arg(steering) must be constant modulo 2*pi.
        const Complex ref = std::polar(1.0, phases(0)) * (steering(0) / std::abs(steering(0)));
        for (Eigen::Index n = 1; n < phases.size(); ++n) {
            const Complex rot = std::polar(1.0, phases(n)) * (steering(n) / std::abs(steering(n)));
            CHECK(std::abs(std::arg(rot / ref)) < 1e-3);
        }
    };
    check_aligned(out.model.tx_phases, a_t);
    check_aligned(out.model.rx_phases, a_r);

    // The matched filter attains the known peak coupling magnitude.
    const ComplexVector c = pa_couplings(space, out.model, ctx);
    const double peak = 0.81 * static_cast<double>(a_t.size()) * static_cast<double>(a_r.size());
    CHECK(std::abs(c(1)) == doctest::Approx(peak).epsilon(1e-6));
}

TEST_CASE("vanishing reflections flag a flat objective") {
    ExperimentConfig cfg = pa_config(2);
    MeasurementContext ctx = make_context(cfg);
    ctx.grid_reflection.setZero();
    const PhasedArrayModel model = make_phased_array(cfg);
    const HypothesisSpace space = enumerate_hypotheses(2, 1);
    SolverConfig solver;
    solver.power_max = 10.0;

    Rng rng(73);
    const PaOptimizationResult init = pa_initial(space, model, ctx, solver.power_max, rng);
    CHECK(init.objective == 0.0);
    const PaOptimizationResult out = pa_optimize(space, ctx, solver, init);
    CHECK(out.flat);
    CHECK(out.objective == 0.0);
    CHECK(out.iterations == 1);
}

TEST_CASE("cost model equates one phased-array element to six surface elements") {
    CostModel cost;
    CHECK(cost.pa_cost(4) == doctest::Approx(cost.rhs_cost(24)).epsilon(1e-15));
    CHECK(cost.pa_cost(1) == 6.0);
    CHECK(cost.rhs_cost(16) == 16.0);

    const ExperimentConfig cfg = pa_config(1);
    const PhasedArrayModel model = make_phased_array(cfg);
    CHECK(model.cost_ratio == 6.0);
    CHECK(model.tx_geometry.n_elements() == 4);
    const double wavelength = 299792458.0 / cfg.frequency_hz;
    CHECK(model.tx_geometry.element_spacing ==
          doctest::Approx(wavelength * 0.5).epsilon(1e-12));
}

TEST_CASE("optimization config is validated") {
    const ExperimentConfig cfg = pa_config(1);
    const MeasurementContext ctx = make_context(cfg);
    const PhasedArrayModel model = make_phased_array(cfg);
    const HypothesisSpace space = enumerate_hypotheses(1, 1);
    Rng rng(79);
    const PaOptimizationResult init = pa_initial(space, model, ctx, 10.0, rng);

    SolverConfig bad;
    bad.power_max = 0.0;
    CHECK_THROWS_AS(pa_optimize(space, ctx, bad, init), std::invalid_argument);
    bad.power_max = 10.0;
    bad.max_outer = 0;
    CHECK_THROWS_AS(pa_optimize(space, ctx, bad, init), std::invalid_argument);
}

} // TEST_SUITE

#include "rhsradar/harness.hpp"

#include "rhsradar/errors.hpp"

#include "json.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <numbers>
#include <ostream>
#include <set>

namespace rhsradar {

namespace {

using nlohmann::json;

[[noreturn]] void bad_key(const std::string& key, const char* expected) {
    throw ConfigError("config key '" + key + "' must be " + expected);
}

double as_number(const json& v, const std::string& key) {
    if (!v.is_number())
        bad_key(key, "a number");
    return v.get<double>();
}

int as_int(const json& v, const std::string& key) {
    if (!v.is_number_integer())
        bad_key(key, "an integer");
    const auto raw = v.get<long long>();
    if (raw < -2147483648LL || raw > 2147483647LL)
        bad_key(key, "a 32-bit integer");
    return static_cast<int>(raw);
}

std::uint64_t as_u64(const json& v, const std::string& key) {
    if (v.is_number_unsigned())
        return v.get<std::uint64_t>();
    if (v.is_number_integer() && v.get<long long>() >= 0)
        return static_cast<std::uint64_t>(v.get<long long>());
    bad_key(key, "a nonnegative integer");
}

bool as_bool(const json& v, const std::string& key) {
    if (!v.is_boolean())
        bad_key(key, "a boolean");
    return v.get<bool>();
}

std::string as_string(const json& v, const std::string& key) {
    if (!v.is_string())
        bad_key(key, "a string");
    return v.get<std::string>();
}

std::vector<int> as_int_list(const json& v, const std::string& key) {
    if (!v.is_array())
        bad_key(key, "an array of integers");
    std::vector<int> out;
    for (const json& item : v)
        out.push_back(as_int(item, key));
    return out;
}

std::vector<double> as_number_list(const json& v, const std::string& key) {
    if (!v.is_array())
        bad_key(key, "an array of numbers");
    std::vector<double> out;
    for (const json& item : v)
        out.push_back(as_number(item, key));
    return out;
}

// Grid layout rule shared by every surface: the squarest factorization, rows
// being the largest divisor not exceeding sqrt(n).
void grid_shape(int n, int& rows, int& cols) {
    rows = 1;
    for (int r = 1; r * r <= n; ++r)
        if (n % r == 0)
            rows = r;
    cols = n / rows;
}

SurfaceGeometry make_surface(int n_elements, double spacing, int n_feeds) {
    int rows = 0, cols = 0;
    grid_shape(n_elements, rows, cols);
    return build_planar_surface(rows, cols, spacing, n_feeds);
}

int hypothesis_index_of(const HypothesisSpace& space, const std::vector<int>& grids) {
    for (std::size_t j = 0; j < space.hypotheses.size(); ++j)
        if (space.hypotheses[j] == grids)
            return static_cast<int>(j);
    throw ConfigError("true scene is not representable in the hypothesis space");
}

double partial_credit_of(const std::vector<int>& accepted, const std::vector<int>& truth) {
    if (truth.empty())
        return accepted.empty() ? 1.0 : 0.0;
    int hits = 0;
    for (int g : truth)
        if (std::find(accepted.begin(), accepted.end(), g) != accepted.end())
            ++hits;
    return static_cast<double>(hits) / static_cast<double>(truth.size());
}

PdEstimate estimate_from_counts(long long correct, long long trials, long long total_cycles,
                                double total_credit) {
    PdEstimate est;
    est.trials = static_cast<int>(trials);
    est.pd = static_cast<double>(correct) / static_cast<double>(trials);
    wilson_interval(correct, trials, est.wilson_lo, est.wilson_hi);
    est.mean_cycles = static_cast<double>(total_cycles) / static_cast<double>(trials);
    est.partial_credit = total_credit / static_cast<double>(trials);
    return est;
}

PdEstimate monte_carlo_impl(const ExperimentConfig& cfg, int trials, bool parallel) {
    validate_config(cfg);
    if (trials < 1)
        throw ConfigError("trial count must be at least 1");
    HypothesisSpace space = enumerate_hypotheses(cfg.grids, cfg.max_targets);
    const std::vector<int> truth = true_grid_indices(cfg);

    std::vector<unsigned char> correct(static_cast<std::size_t>(trials), 0);
    std::vector<int> cycles(static_cast<std::size_t>(trials), 0);
    std::vector<double> credit(static_cast<std::size_t>(trials), 0.0);
    std::atomic<bool> failed{false};
    std::string failure;

    const auto one_trial = [&](int t) {
        Rng rng(Rng::derive(cfg.seed, static_cast<std::uint64_t>(t)));
        TrialResult r = run_detection(cfg, rng);
        correct[static_cast<std::size_t>(t)] = r.correct ? 1 : 0;
        cycles[static_cast<std::size_t>(t)] = r.cycles_used;
        credit[static_cast<std::size_t>(t)] = partial_credit_of(
            space.hypotheses[static_cast<std::size_t>(r.accepted)], truth);
    };

    if (parallel) {
#pragma omp parallel for schedule(dynamic)
        for (int t = 0; t < trials; ++t) {
            if (failed)
                continue;
            try {
                one_trial(t);
            } catch (const std::exception& e) {
#pragma omp critical
                {
                    if (!failed.exchange(true))
                        failure = e.what();
                }
            }
        }
    } else {
        for (int t = 0; t < trials; ++t)
            one_trial(t);
    }
    if (failed)
        throw NumericalError("trial failed: " + failure);

    // Trial-index-order reduction; counts and sums do not depend on how the
    // trials were scheduled.
    long long n_correct = 0, total_cycles = 0;
    double total_credit = 0.0;
    for (int t = 0; t < trials; ++t) {
        n_correct += correct[static_cast<std::size_t>(t)];
        total_cycles += cycles[static_cast<std::size_t>(t)];
        total_credit += credit[static_cast<std::size_t>(t)];
    }
    return estimate_from_counts(n_correct, trials, total_cycles, total_credit);
}

} // namespace

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in)
        throw ConfigError("cannot open config file: " + path);
    json root;
    try {
        root = json::parse(in);
    } catch (const json::exception& e) {
        throw ConfigError("config parse error: " + std::string(e.what()));
    }
    if (!root.is_object())
        throw ConfigError("config root must be an object");

    ExperimentConfig cfg;
    for (const auto& [key, value] : root.items()) {
        if (key == "frequency_hz")
            cfg.frequency_hz = as_number(value, key);
        else if (key == "tx_elements")
            cfg.tx_elements = as_int(value, key);
        else if (key == "rx_elements")
            cfg.rx_elements = as_int(value, key);
        else if (key == "tx_feeds")
            cfg.tx_feeds = as_int(value, key);
        else if (key == "rx_feeds")
            cfg.rx_feeds = as_int(value, key);
        else if (key == "element_spacing_factor")
            cfg.element_spacing_factor = as_number(value, key);
        else if (key == "pa_spacing_factor")
            cfg.pa_spacing_factor = as_number(value, key);
        else if (key == "refractive_index")
            cfg.refractive_index = as_number(value, key);
        else if (key == "attenuation")
            cfg.attenuation = as_number(value, key);
        else if (key == "grids")
            cfg.grids = as_int(value, key);
        else if (key == "grid_polar")
            cfg.grid_polar = as_number(value, key);
        else if (key == "max_targets")
            cfg.max_targets = as_int(value, key);
        else if (key == "true_grids")
            cfg.true_grids = as_int_list(value, key);
        else if (key == "noise_power")
            cfg.noise_power = as_number(value, key);
        else if (key == "power_max")
            cfg.power_max = as_number(value, key);
        else if (key == "snapshots")
            cfg.snapshots = as_int(value, key);
        else if (key == "max_cycles")
            cfg.max_cycles = as_int(value, key);
        else if (key == "accept_threshold")
            cfg.accept_threshold = as_number(value, key);
        else if (key == "reject_threshold")
            cfg.reject_threshold = as_number(value, key);
        else if (key == "trials")
            cfg.trials = as_int(value, key);
        else if (key == "seed")
            cfg.seed = as_u64(value, key);
        else if (key == "antenna")
            cfg.antenna = as_string(value, key);
        else if (key == "pa_elements")
            cfg.pa_elements = as_int(value, key);
        else if (key == "pa_feed_gain")
            cfg.pa_feed_gain = as_number(value, key);
        else if (key == "pa_cost_ratio")
            cfg.pa_cost_ratio = as_number(value, key);
        else if (key == "tol_outer")
            cfg.tol_outer = as_number(value, key);
        else if (key == "tol_fp")
            cfg.tol_fp = as_number(value, key);
        else if (key == "max_outer")
            cfg.max_outer = as_int(value, key);
        else if (key == "max_fp")
            cfg.max_fp = as_int(value, key);
        else if (key == "safeguard")
            cfg.safeguard = as_bool(value, key);
        else if (key == "sweep_axis")
            cfg.sweep_axis = as_string(value, key);
        else if (key == "sweep_values")
            cfg.sweep_values = as_number_list(value, key);
        else
            throw ConfigError("unknown config key: " + key);
    }
    validate_config(cfg);
    return cfg;
}

void validate_config(const ExperimentConfig& cfg) {
    const auto require = [](bool ok, const char* message) {
        if (!ok)
            throw ConfigError(message);
    };
    require(cfg.frequency_hz > 0.0, "frequency_hz must be positive");
    require(cfg.tx_elements >= 1 && cfg.rx_elements >= 1, "element counts must be at least 1");
    require(cfg.tx_feeds >= 1 && cfg.rx_feeds >= 1, "feed counts must be at least 1");
    require(cfg.element_spacing_factor > 0.0 && cfg.pa_spacing_factor > 0.0,
            "spacing factors must be positive");
    require(cfg.refractive_index > 0.0, "refractive_index must be positive");
    require(cfg.attenuation >= 0.0, "attenuation must be nonnegative");
    require(cfg.grids >= 1, "grids must be at least 1");
    require(cfg.grid_polar >= 0.0 && cfg.grid_polar <= std::numbers::pi,
            "grid_polar must lie in [0, pi]");
    require(cfg.max_targets >= 1 && cfg.max_targets <= cfg.grids,
            "max_targets must lie in [1, grids]");
    std::set<int> seen;
    for (int g : cfg.true_grids) {
        if (g < 1 || g > cfg.grids)
            throw ConfigError("true_grids entries must be 1-based grid numbers");
        if (!seen.insert(g).second)
            throw ConfigError("true_grids entries must be distinct");
    }
    require(static_cast<int>(cfg.true_grids.size()) <= cfg.max_targets,
            "true scene has more targets than max_targets");
    require(cfg.noise_power > 0.0, "noise_power must be positive");
    require(cfg.power_max > 0.0, "power_max must be positive");
    require(cfg.snapshots >= 1, "snapshots must be at least 1");
    require(cfg.max_cycles >= 1, "max_cycles must be at least 1");
    require(cfg.reject_threshold >= 0.0, "reject_threshold must be nonnegative");
    require(cfg.accept_threshold > cfg.reject_threshold,
            "accept_threshold must exceed reject_threshold");
    require(cfg.trials >= 1, "trials must be at least 1");
    require(cfg.antenna == "rhs" || cfg.antenna == "pa", "antenna must be 'rhs' or 'pa'");
    require(cfg.pa_elements >= 1, "pa_elements must be at least 1");
    require(cfg.pa_feed_gain > 0.0 && cfg.pa_feed_gain <= 1.0,
            "pa_feed_gain must lie in (0, 1]");
    require(cfg.pa_cost_ratio > 0.0, "pa_cost_ratio must be positive");
    require(cfg.tol_outer > 0.0 && cfg.tol_fp > 0.0, "solver tolerances must be positive");
    require(cfg.max_outer >= 1 && cfg.max_fp >= 1, "iteration caps must be at least 1");

    if (!cfg.sweep_axis.empty()) {
        const bool known = cfg.sweep_axis == "cost" || cfg.sweep_axis == "cycles" ||
                           cfg.sweep_axis == "elements" || cfg.sweep_axis == "power" ||
                           cfg.sweep_axis == "snapshots";
        require(known, "sweep_axis must be one of cost, cycles, elements, power, snapshots");
        require(!cfg.sweep_values.empty(), "sweep_values must not be empty");
        for (double v : cfg.sweep_values) {
            require(v > 0.0, "sweep_values must be positive");
            if (cfg.sweep_axis != "power")
                require(v == std::floor(v), "sweep_values must be integers for this axis");
            if (cfg.sweep_axis == "cost") {
                const double pa = v / cfg.pa_cost_ratio;
                require(pa >= 1.0 && std::abs(pa - std::round(pa)) < 1e-9,
                        "cost values must map to whole phased-array element counts");
            }
        }
    } else {
        require(cfg.sweep_values.empty(), "sweep_values given without a sweep_axis");
    }
}

MeasurementContext make_context(const ExperimentConfig& cfg) {
    const double wavelength = 299792458.0 / cfg.frequency_hz;
    MeasurementContext ctx;
    ctx.tx_geometry =
        make_surface(cfg.tx_elements, wavelength * cfg.element_spacing_factor, cfg.tx_feeds);
    ctx.rx_geometry =
        make_surface(cfg.rx_elements, wavelength * cfg.element_spacing_factor, cfg.rx_feeds);
    ctx.tx_propagation =
        propagation_matrices(ctx.tx_geometry, cfg.refractive_index, cfg.attenuation, wavelength);
    ctx.rx_propagation =
        propagation_matrices(ctx.rx_geometry, cfg.refractive_index, cfg.attenuation, wavelength);
    ctx.wavelength = wavelength;
    ctx.noise_power = cfg.noise_power;
    ctx.tx_snapshots = cfg.snapshots;
    ctx.rx_snapshots = cfg.snapshots;
    // Sector centers, rotated by pi/12 so no two grids are related by a
    // reflection symmetry of the rectangular aperture (x-mirror, y-mirror, or
    // the diagonal swap of a square layout). On-axis sector centers put such
    // pairs at nearly identical couplings, which makes square layouts far
    // worse at separating hypotheses than smaller rectangular ones.
    for (int j = 1; j <= cfg.grids; ++j)
        ctx.grid_directions.push_back(
            {(2.0 * j - 1.0) * std::numbers::pi / cfg.grids + std::numbers::pi / 12.0,
             cfg.grid_polar});
    ctx.grid_reflection = ComplexVector::Ones(cfg.grids);
    return ctx;
}

PhasedArrayModel make_phased_array(const ExperimentConfig& cfg) {
    const double wavelength = 299792458.0 / cfg.frequency_hz;
    PhasedArrayModel model;
    model.tx_geometry = make_surface(cfg.pa_elements, wavelength * cfg.pa_spacing_factor, 1);
    model.rx_geometry = make_surface(cfg.pa_elements, wavelength * cfg.pa_spacing_factor, 1);
    model.tx_phases = RealVector::Zero(cfg.pa_elements);
    model.rx_phases = RealVector::Zero(cfg.pa_elements);
    model.feed_gain = cfg.pa_feed_gain;
    model.cost_ratio = cfg.pa_cost_ratio;
    return model;
}

SolverConfig make_solver_config(const ExperimentConfig& cfg) {
    SolverConfig s;
    s.power_max = cfg.power_max;
    s.tol_outer = cfg.tol_outer;
    s.tol_fp = cfg.tol_fp;
    s.max_outer = cfg.max_outer;
    s.max_fp = cfg.max_fp;
    s.safeguard = cfg.safeguard;
    return s;
}

std::vector<int> true_grid_indices(const ExperimentConfig& cfg) {
    std::vector<int> indices;
    indices.reserve(cfg.true_grids.size());
    for (int g : cfg.true_grids)
        indices.push_back(g - 1);
    std::sort(indices.begin(), indices.end());
    return indices;
}

void wilson_interval(long long successes, long long trials, double& lo, double& hi) {
    const double z = 1.959963984540054; // 97.5th percentile of the standard normal
    const double n = static_cast<double>(trials);
    const double p = static_cast<double>(successes) / n;
    const double denom = 1.0 + z * z / n;
    const double center = (p + z * z / (2.0 * n)) / denom;
    const double half =
        z * std::sqrt(p * (1.0 - p) / n + z * z / (4.0 * n * n)) / denom;
    lo = std::max(0.0, center - half);
    hi = std::min(1.0, center + half);
    // At the extremes the bound is analytically exact (center == half when
    // p == 0); snap it so rounding residue cannot leak into comparisons.
    if (successes == 0)
        lo = 0.0;
    if (successes == trials)
        hi = 1.0;
}

TrialResult run_detection(const ExperimentConfig& cfg, Rng& rng) {
    validate_config(cfg);
    MeasurementContext ctx = make_context(cfg);
    HypothesisSpace current = enumerate_hypotheses(cfg.grids, cfg.max_targets);
    const std::vector<int> truth = true_grid_indices(cfg);
    const Scene scene = ctx.scene_of(truth);
    const SolverConfig solver = make_solver_config(cfg);

    TrialResult result;
    result.true_hypothesis = hypothesis_index_of(current, truth);

    const bool use_pa = cfg.antenna == "pa";
    OptimizationVariables rhs_vars;
    PaOptimizationResult pa_vars;
    PhasedArrayModel pa_model;
    if (use_pa) {
        pa_model = make_phased_array(cfg);
        pa_vars = pa_initial(current, pa_model, ctx, cfg.power_max, rng);
    } else {
        rhs_vars = initial_variables(current, ctx, cfg.power_max, rng);
    }

    for (int cycle = 1; cycle <= cfg.max_cycles; ++cycle) {
        // The first cycle transmits with the random initialization; later
        // cycles re-optimize against the current posterior first.
        if (cycle >= 2) {
            if (use_pa)
                pa_vars = pa_optimize(current, ctx, solver, pa_vars);
            else
                rhs_vars = waoa(current, ctx, solver, rhs_vars);
        }

        ComplexVector measurement;
        std::vector<ComplexVector> signals;
        NoiseCovariance noise;
        if (use_pa) {
            measurement =
                pa_simulate_measurement(scene, pa_vars.waveform, pa_vars.model, ctx, rng);
            const ComplexVector c = pa_couplings(current, pa_vars.model, ctx);
            signals.reserve(static_cast<std::size_t>(current.size()));
            for (Eigen::Index j = 0; j < current.size(); ++j)
                signals.push_back(c(j) * pa_vars.waveform);
            noise = pa_noise_covariance(pa_vars.model, ctx);
        } else {
            measurement = simulate_measurement(scene, rhs_vars.vars, ctx, rng);
            signals = effective_signals(current.hypotheses, rhs_vars.vars, ctx);
            noise = noise_covariance(rhs_vars.vars.rx_amplitudes, ctx.rx_propagation,
                                     ctx.noise_power, ctx.rx_snapshots);
        }

        RealVector loglikes(current.size());
        for (Eigen::Index j = 0; j < current.size(); ++j)
            loglikes(j) =
                log_likelihood(measurement, signals[static_cast<std::size_t>(j)], noise);
        current = posterior_update(current, loglikes);
        result.true_posterior_trace.push_back(current.priors(result.true_hypothesis));
        result.cycles_used = cycle;

        const int decision =
            check_termination(current.priors, cfg.accept_threshold, cfg.reject_threshold);
        if (decision >= 0) {
            result.accepted = decision;
            break;
        }
        if (cycle == cfg.max_cycles) {
            Eigen::Index best = 0;
            current.priors.maxCoeff(&best);
            result.accepted = static_cast<int>(best);
        }
    }
    result.correct = result.accepted == result.true_hypothesis;
    return result;
}

PdEstimate monte_carlo_pd(const ExperimentConfig& cfg, int trials) {
    return monte_carlo_impl(cfg, trials, true);
}

PdEstimate monte_carlo_pd_serial(const ExperimentConfig& cfg, int trials) {
    return monte_carlo_impl(cfg, trials, false);
}

std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg) {
    validate_config(cfg);
    if (cfg.sweep_axis.empty())
        throw ConfigError("run_sweep requires a sweep_axis");

    std::vector<SweepRow> rows;
    for (double value : cfg.sweep_values) {
        if (cfg.sweep_axis == "cost") {
            // Equal hardware cost on both antennas: N holographic elements
            // against N / cost_ratio phased-array elements.
            ExperimentConfig rhs_cfg = cfg;
            rhs_cfg.antenna = "rhs";
            rhs_cfg.tx_elements = static_cast<int>(value);
            rhs_cfg.rx_elements = static_cast<int>(value);
            rows.push_back({value, "rhs", monte_carlo_pd(rhs_cfg, rhs_cfg.trials)});

            ExperimentConfig pa_cfg = cfg;
            pa_cfg.antenna = "pa";
            pa_cfg.pa_elements = static_cast<int>(std::llround(value / cfg.pa_cost_ratio));
            rows.push_back({value, "pa", monte_carlo_pd(pa_cfg, pa_cfg.trials)});
            continue;
        }

        ExperimentConfig point = cfg;
        if (cfg.sweep_axis == "cycles") {
            point.max_cycles = static_cast<int>(value);
        } else if (cfg.sweep_axis == "elements") {
            if (cfg.antenna == "pa")
                point.pa_elements = static_cast<int>(value);
            else {
                point.tx_elements = static_cast<int>(value);
                point.rx_elements = static_cast<int>(value);
            }
        } else if (cfg.sweep_axis == "power") {
            point.power_max = value;
        } else if (cfg.sweep_axis == "snapshots") {
            point.snapshots = static_cast<int>(value);
        }
        rows.push_back({value, point.antenna, monte_carlo_pd(point, point.trials)});
    }
    return rows;
}

void write_csv(const std::vector<SweepRow>& rows, std::ostream& out) {
    out << "axis_value,antenna,trials,pd,wilson_lo,wilson_hi,mean_cycles\n";
    char line[256];
    for (const SweepRow& row : rows) {
        std::snprintf(line, sizeof(line), "%.10g,%s,%d,%.6f,%.6f,%.6f,%.6f\n", row.axis_value,
                      row.antenna.c_str(), row.estimate.trials, row.estimate.pd,
                      row.estimate.wilson_lo, row.estimate.wilson_hi, row.estimate.mean_cycles);
        out << line;
    }
}

} // namespace rhsradar

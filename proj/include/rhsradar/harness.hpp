#ifndef RHSRADAR_HARNESS_HPP
#define RHSRADAR_HARNESS_HPP

#include "rhsradar/baseline.hpp"

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

namespace rhsradar {

/**
 * Full description of one experiment. Loadable from JSON (unknown keys are
 * rejected); grid numbers in `true_grids` are 1-based as in the docs, all
 * internal indices are 0-based.
 */
struct ExperimentConfig {
    double frequency_hz = 30e9;
    int tx_elements = 16;
    int rx_elements = 16;
    int tx_feeds = 1;
    int rx_feeds = 1;
    double element_spacing_factor = 1.0 / 3.0; // fraction of a wavelength
    double pa_spacing_factor = 0.5;
    double refractive_index = 1.7320508075688772; // substrate index for feed propagation
    double attenuation = 5.0;                     // 1/m, feed propagation loss
    int grids = 4;                                // angular grids J
    double grid_polar = 0.5235987755982988;       // polar angle of every grid center
    int max_targets = 2;
    std::vector<int> true_grids = {1, 2}; // 1-based grid numbers of the true targets
    double noise_power = 1.0;
    double power_max = 10.0;
    int snapshots = 4;
    int max_cycles = 10;
    double accept_threshold = 0.9;
    double reject_threshold = 0.05;
    int trials = 500;
    std::uint64_t seed = 1;
    std::string antenna = "rhs"; // "rhs" or "pa"
    int pa_elements = 4;
    double pa_feed_gain = 0.9;
    double pa_cost_ratio = 6.0;
    double tol_outer = 1e-4;
    double tol_fp = 1e-6;
    int max_outer = 30;
    int max_fp = 200;
    bool safeguard = true;
    std::string sweep_axis;           // "", "cost", "cycles", "elements", "power", "snapshots"
    std::vector<double> sweep_values;
};

/// Parse and validate a JSON config file. Throws ConfigError on any problem,
/// including keys that are not ExperimentConfig fields.
ExperimentConfig load_config(const std::string& path);

/// Field-level validation shared by load_config and the entry points.
void validate_config(const ExperimentConfig& cfg);

/// Holographic-surface context for the configured scenario.
MeasurementContext make_context(const ExperimentConfig& cfg);

/// Phased-array model at the configured element count (zero phases).
PhasedArrayModel make_phased_array(const ExperimentConfig& cfg);

SolverConfig make_solver_config(const ExperimentConfig& cfg);

/// 0-based grid indices of the true targets, sorted.
std::vector<int> true_grid_indices(const ExperimentConfig& cfg);

struct TrialResult {
    int accepted = -1;
    int true_hypothesis = -1;
    int cycles_used = 0;
    bool correct = false;
    std::vector<double> true_posterior_trace; // posterior of the truth after each cycle
};

/**
 * One adaptive detection run: the first cycle transmits with random
 * variables, later cycles re-optimize against the current posterior before
 * measuring; stops on the confidence rule or accepts the argmax at the cycle
 * cap.
 */
TrialResult run_detection(const ExperimentConfig& cfg, Rng& rng);

struct PdEstimate {
    double pd = 0.0;
    double wilson_lo = 0.0;
    double wilson_hi = 0.0;
    double mean_cycles = 0.0;
    double partial_credit = 0.0; // mean fraction of true grids recovered
    int trials = 0;
};

/// 95% Wilson score interval for `successes` out of `trials`.
void wilson_interval(long long successes, long long trials, double& lo, double& hi);

/// Monte Carlo detection probability with per-trial seeds derived from the
/// master seed; results are independent of the thread count.
PdEstimate monte_carlo_pd(const ExperimentConfig& cfg, int trials);
PdEstimate monte_carlo_pd_serial(const ExperimentConfig& cfg, int trials);

struct SweepRow {
    double axis_value = 0.0;
    std::string antenna;
    PdEstimate estimate;
};

/// One Pd estimate per sweep value; the cost axis runs both antennas at equal
/// hardware cost, other axes run the configured antenna.
std::vector<SweepRow> run_sweep(const ExperimentConfig& cfg);

/// Plot-ready CSV: axis_value,antenna,trials,pd,wilson_lo,wilson_hi,mean_cycles
void write_csv(const std::vector<SweepRow>& rows, std::ostream& out);

} // namespace rhsradar

#endif

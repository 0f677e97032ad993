#include "rhsradar/hypothesis.hpp"

#include <limits>
#include <stdexcept>

namespace rhsradar {

namespace {

long long binomial(int n, int k) {
    if (k < 0 || k > n)
        return 0;
    k = std::min(k, n - k);
    long long result = 1;
    for (int i = 1; i <= k; ++i)
        result = result * (n - k + i) / i; // exact: product of i consecutive ints divides by i!
    return result;
}

} // namespace

long long hypothesis_count(int n_grids, int max_targets) {
    long long total = 0;
    for (int k = 0; k <= max_targets; ++k)
        total += binomial(n_grids, k);
    return total;
}

HypothesisSpace enumerate_hypotheses(int n_grids, int max_targets) {
    if (n_grids < 1)
        throw std::invalid_argument("need at least one angular grid");
    if (max_targets < 1 || max_targets > n_grids)
        throw std::invalid_argument("target cap must lie in [1, n_grids]");

    HypothesisSpace space;
    space.n_grids = n_grids;
    space.max_targets = max_targets;
    space.hypotheses.reserve(static_cast<std::size_t>(hypothesis_count(n_grids, max_targets)));

    std::vector<double> priors;
    const double class_mass = 1.0 / (max_targets + 1);
    for (int k = 0; k <= max_targets; ++k) {
        const double prior = class_mass / static_cast<double>(binomial(n_grids, k));
        // Lexicographic k-combinations of {0, ..., n_grids-1}.
        std::vector<int> combo(static_cast<std::size_t>(k));
        for (int i = 0; i < k; ++i)
            combo[static_cast<std::size_t>(i)] = i;
        while (true) {
            space.hypotheses.push_back(combo);
            priors.push_back(prior);
            if (k == 0)
                break;
            int i = k - 1;
            while (i >= 0 && combo[static_cast<std::size_t>(i)] == n_grids - k + i)
                --i;
            if (i < 0)
                break;
            ++combo[static_cast<std::size_t>(i)];
            for (int j = i + 1; j < k; ++j)
                combo[static_cast<std::size_t>(j)] = combo[static_cast<std::size_t>(j - 1)] + 1;
        }
    }

    space.priors = Eigen::Map<const RealVector>(priors.data(), static_cast<Eigen::Index>(priors.size()));
    return space;
}

double log_likelihood(const ComplexVector& measurement, const ComplexVector& hypothesis_signal,
                      const NoiseCovariance& noise) {
    return -noise.quadratic_inverse_form(measurement, hypothesis_signal);
}

double log_likelihood(const ComplexVector& measurement, const std::vector<int>& grid_indices,
                      const RadarVariables& vars, const MeasurementContext& ctx) {
    ComplexVector u = effective_signal(grid_indices, vars.waveform, vars.tx_amplitudes,
                                       vars.rx_amplitudes, ctx);
    NoiseCovariance noise =
        noise_covariance(vars.rx_amplitudes, ctx.rx_propagation, ctx.noise_power, ctx.rx_snapshots);
    return log_likelihood(measurement, u, noise);
}

RealVector posterior_probabilities(const RealVector& priors, const RealVector& log_likelihoods) {
    if (priors.size() != log_likelihoods.size())
        throw std::invalid_argument("prior/likelihood length mismatch");
    if (priors.size() == 0)
        throw std::invalid_argument("empty hypothesis set");
    if ((priors.array() < 0.0).any())
        throw std::invalid_argument("priors must be nonnegative");
    if (!log_likelihoods.allFinite())
        throw std::invalid_argument("log-likelihoods must be finite");

    RealVector log_post(priors.size());
    for (Eigen::Index j = 0; j < priors.size(); ++j) {
        if (priors(j) > 0.0)
            log_post(j) = std::log(priors(j)) + log_likelihoods(j);
        else
            log_post(j) = -std::numeric_limits<double>::infinity();
    }
    const double peak = log_post.maxCoeff();
    if (!std::isfinite(peak))
        throw std::invalid_argument("no hypothesis has positive prior mass");
    RealVector post = (log_post.array() - peak).exp();
    return post / post.sum();
}

HypothesisSpace posterior_update(const HypothesisSpace& space, const RealVector& log_likelihoods) {
    HypothesisSpace updated = space;
    updated.priors = posterior_probabilities(space.priors, log_likelihoods);
    return updated;
}

int check_termination(const RealVector& posteriors, double accept_threshold,
                      double reject_threshold) {
    if (posteriors.size() == 0)
        throw std::invalid_argument("empty posterior");
    Eigen::Index best = 0;
    posteriors.maxCoeff(&best);
    if (posteriors(best) < accept_threshold)
        return -1;
    for (Eigen::Index j = 0; j < posteriors.size(); ++j)
        if (j != best && posteriors(j) > reject_threshold)
            return -1;
    return static_cast<int>(best);
}

} // namespace rhsradar

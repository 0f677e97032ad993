#ifndef RHSRADAR_HYPOTHESIS_HPP
#define RHSRADAR_HYPOTHESIS_HPP

#include "rhsradar/signal.hpp"

#include <vector>

namespace rhsradar {

/**
 * All candidate target placements over the angular grids: the empty
 * hypothesis, then every subset of grids up to the target-count cap, ordered
 * by cardinality and lexicographically within each cardinality.
 */
struct HypothesisSpace {
    int n_grids = 0;
    int max_targets = 0;
    std::vector<std::vector<int>> hypotheses; // sorted grid indices per hypothesis
    RealVector priors;

    Eigen::Index size() const { return static_cast<Eigen::Index>(hypotheses.size()); }
};

/// Number of hypotheses: sum of C(n_grids, k) for k = 0..max_targets.
long long hypothesis_count(int n_grids, int max_targets);

/**
 * Builds the hypothesis list with flat priors over target counts: every
 * cardinality class shares mass 1/(max_targets+1), split evenly inside the
 * class. Priors therefore sum to one by construction.
 */
HypothesisSpace enumerate_hypotheses(int n_grids, int max_targets);

/// Gaussian log-likelihood of a measurement under one hypothesis signal,
/// up to the shared normalizing constant: -(y-u)^H Sigma^{-1} (y-u).
double log_likelihood(const ComplexVector& measurement, const ComplexVector& hypothesis_signal,
                      const NoiseCovariance& noise);

/// Same, computing the hypothesis signal and noise model from the context.
double log_likelihood(const ComplexVector& measurement, const std::vector<int>& grid_indices,
                      const RadarVariables& vars, const MeasurementContext& ctx);

/// Bayes update in the log domain (max-subtracted for stability); returns
/// normalized posterior probabilities.
RealVector posterior_probabilities(const RealVector& priors, const RealVector& log_likelihoods);

/// Bayes update returning a new space whose priors are the posterior.
HypothesisSpace posterior_update(const HypothesisSpace& space, const RealVector& log_likelihoods);

/**
 * Confidence stopping rule: decide when the leading posterior reaches
 * accept_threshold while every other hypothesis has fallen to
 * reject_threshold or below. Returns the decided hypothesis index, or -1 to
 * continue measuring.
 */
int check_termination(const RealVector& posteriors, double accept_threshold,
                      double reject_threshold);

} // namespace rhsradar

#endif

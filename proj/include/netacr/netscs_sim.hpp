#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "netacr/acr_model.hpp"
#include "netacr/system_spec.hpp"

namespace netacr {

/// u_k = f(xhat_k, k)
using Controller = std::function<double(double xhat, int k)>;

/// u_k = -gain * xhat_k
Controller state_feedback(double gain = 1.0);

/// One closed-loop realization over steps 0..horizon.
struct TrialTrace {
    std::vector<double> x;
    std::vector<double> xhat;
    std::vector<double> e;
    std::vector<double> u;
    std::vector<double> w;  ///< w[k] drives x[k+1]
    std::vector<int> delta;
    std::vector<int> iota;  ///< last sampling instant at or before k
};

TrialTrace simulate_trial(const SystemSpec& spec, const Controller& controller, int horizon, std::uint64_t seed);

/// Replays the scheduler/estimator rules against a trace; returns one message per violated invariant.
std::vector<std::string> trace_violations(const TrialTrace& trace, const SystemSpec& spec);

struct McSummary {
    int trials = 0;
    int horizon = 0;
    AcrSeries acr;  ///< fraction of trials sampling at k

    /// error_samples[j]: e at j steps after a sample, from runs silent for all j steps (pooled over
    /// every sampling instant). open_loop_samples[j]: the same noise replayed without resets.
    std::vector<std::vector<double>> error_samples;
    std::vector<std::vector<double>> open_loop_samples;

    /// Runs observed at depth n (index n-1) and those still silent there, pooled over all sampling instants.
    std::vector<std::int64_t> at_risk;
    std::vector<std::int64_t> survived;
    /// Same counts restricted to the run that starts at k = 0.
    std::vector<std::int64_t> at_risk_first;
    std::vector<std::int64_t> survived_first;
};

struct McOptions {
    int horizon = 50;
    int trials = 10000;
    std::uint64_t master_seed = 0;
    unsigned threads = 0;  ///< 0 = hardware concurrency; never changes the result
};

McSummary monte_carlo_acr(const SystemSpec& spec, const Controller& controller, const McOptions& options);

struct FrequencyEstimate {
    double value = 0.0;
    std::int64_t runs = 0;
    bool low_confidence = false;  ///< fewer than 100 runs reached this depth
};

/// Empirical predictive coefficients n = 1..T from pooled post-sample runs.
std::vector<FrequencyEstimate> conditional_frequencies(const McSummary& summary, int T, bool first_run_only = false);

double sample_variance(const std::vector<double>& xs);
double sample_mean(const std::vector<double>& xs);

}  // namespace netacr

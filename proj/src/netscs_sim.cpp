#include "netacr/netscs_sim.hpp"

#include <cmath>
#include <numeric>

#include "netacr/rng.hpp"
#include "parallel.hpp"

namespace netacr {

namespace {

constexpr std::int64_t kMinRunsForConfidence = 100;

struct BlockTally {
    std::vector<std::int64_t> triggers;  // per k
    std::vector<std::vector<double>> error_samples;
    std::vector<std::vector<double>> open_loop_samples;
    std::vector<std::int64_t> at_risk, survived, at_risk_first, survived_first;

    BlockTally(int horizon, int T)
        : triggers(horizon + 1, 0),
          error_samples(T + 1),
          open_loop_samples(T + 1),
          at_risk(T, 0),
          survived(T, 0),
          at_risk_first(T, 0),
          survived_first(T, 0)
    {
    }
};

void tally_trace(const TrialTrace& tr, const SystemSpec& spec, BlockTally& out)
{
    const int horizon = static_cast<int>(tr.delta.size()) - 1;
    for (int k = 0; k <= horizon; ++k) {
        out.triggers[k] += tr.delta[k];
    }
    for (int start = 0; start <= horizon; ++start) {
        if (tr.delta[start] != 1) {
            continue;
        }
        const bool first = start == 0;
        double open_loop = 0.0;
        bool silent = true;
        for (int j = 1; j <= spec.T && start + j <= horizon; ++j) {
            open_loop = spec.A * open_loop + tr.w[start + j - 1];
            out.open_loop_samples[j].push_back(open_loop);
            if (!silent) {
                continue;
            }
            ++out.at_risk[j - 1];
            if (first) {
                ++out.at_risk_first[j - 1];
            }
            if (tr.delta[start + j] == 0) {
                ++out.survived[j - 1];
                if (first) {
                    ++out.survived_first[j - 1];
                }
                out.error_samples[j].push_back(tr.e[start + j]);
            } else {
                silent = false;
            }
        }
    }
}

}  // namespace

Controller state_feedback(double gain)
{
    return [gain](double xhat, int) { return -gain * xhat; };
}

TrialTrace simulate_trial(const SystemSpec& spec, const Controller& controller, int horizon, std::uint64_t seed)
{
    spec.validate();
    if (horizon < 1) {
        throw Error(ErrorKind::InvalidParameter, "simulation horizon must be at least 1");
    }
    Engine rng(seed);
    std::normal_distribution<double> noise(0.0, spec.sigma);

    const auto n = static_cast<std::size_t>(horizon) + 1;
    TrialTrace tr;
    tr.x.resize(n);
    tr.xhat.resize(n);
    tr.e.resize(n);
    tr.u.resize(n);
    tr.w.resize(n);
    tr.delta.resize(n);
    tr.iota.resize(n);

    tr.x[0] = spec.x0;
    tr.xhat[0] = spec.x0;
    tr.e[0] = 0.0;
    tr.delta[0] = 1;
    tr.iota[0] = 0;
    tr.u[0] = controller(tr.xhat[0], 0);
    tr.w[0] = noise(rng);

    for (int k = 1; k <= horizon; ++k) {
        tr.x[k] = spec.A * tr.x[k - 1] + spec.B * tr.u[k - 1] + tr.w[k - 1];
        const bool fire = std::abs(tr.e[k - 1]) >= spec.eta || k - tr.iota[k - 1] > spec.T;
        if (fire) {
            tr.delta[k] = 1;
            tr.iota[k] = k;
            tr.xhat[k] = tr.x[k];
        } else {
            tr.delta[k] = 0;
            tr.iota[k] = tr.iota[k - 1];
            tr.xhat[k] = spec.A * tr.xhat[k - 1] + spec.B * tr.u[k - 1];
        }
        tr.e[k] = tr.x[k] - tr.xhat[k];
        tr.u[k] = controller(tr.xhat[k], k);
        tr.w[k] = noise(rng);
    }
    return tr;
}

std::vector<std::string> trace_violations(const TrialTrace& tr, const SystemSpec& spec)
{
    std::vector<std::string> issues;
    const auto n = tr.delta.size();
    if (n == 0 || tr.delta[0] != 1) {
        issues.emplace_back("delta[0] must be 1");
        return issues;
    }
    int silent_run = 0;
    for (std::size_t k = 0; k < n; ++k) {
        const auto at = " at k=" + std::to_string(k);
        if (tr.e[k] != tr.x[k] - tr.xhat[k]) {
            issues.push_back("e != x - xhat" + at);
        }
        if (tr.delta[k] == 1 && tr.e[k] != 0.0) {
            issues.push_back("estimator not reset after sampling" + at);
        }
        silent_run = tr.delta[k] == 1 ? 0 : silent_run + 1;
        if (silent_run > spec.T) {
            issues.push_back("more than T consecutive silent steps" + at);
        }
        if (k == 0) {
            continue;
        }
        const bool expected = std::abs(tr.e[k - 1]) >= spec.eta || static_cast<int>(k) - tr.iota[k - 1] > spec.T;
        if ((tr.delta[k] == 1) != expected) {
            issues.push_back("scheduler decision mismatch" + at);
        }
        if (tr.delta[k] == 0) {
            const double predicted = spec.A * tr.e[k - 1] + tr.w[k - 1];
            if (std::abs(tr.e[k] - predicted) > 1e-9 * (1.0 + std::abs(tr.x[k]))) {
                issues.push_back("error dynamics mismatch" + at);
            }
        }
    }
    return issues;
}

McSummary monte_carlo_acr(const SystemSpec& spec, const Controller& controller, const McOptions& options)
{
    spec.validate();
    if (options.trials < 1) {
        throw Error(ErrorKind::InvalidParameter, "trial count must be positive");
    }
    if (options.horizon < 1) {
        throw Error(ErrorKind::InvalidParameter, "simulation horizon must be at least 1");
    }
    const int block = detail::kTrialBlock;
    const std::size_t blocks = (options.trials + block - 1) / block;
    std::vector<BlockTally> tallies(blocks, BlockTally(options.horizon, spec.T));

    detail::for_each_block(blocks, options.threads, [&](std::size_t b) {
        const int first = static_cast<int>(b) * block;
        const int last = std::min(options.trials, first + block);
        for (int i = first; i < last; ++i) {
            const auto tr = simulate_trial(spec, controller, options.horizon,
                                           derive_seed(options.master_seed, static_cast<std::uint64_t>(i)));
            tally_trace(tr, spec, tallies[b]);
        }
    });

    McSummary s;
    s.trials = options.trials;
    s.horizon = options.horizon;
    s.error_samples.resize(spec.T + 1);
    s.open_loop_samples.resize(spec.T + 1);
    s.at_risk.assign(spec.T, 0);
    s.survived.assign(spec.T, 0);
    s.at_risk_first.assign(spec.T, 0);
    s.survived_first.assign(spec.T, 0);
    std::vector<std::int64_t> triggers(options.horizon + 1, 0);
    for (const auto& t : tallies) {
        for (std::size_t k = 0; k < triggers.size(); ++k) {
            triggers[k] += t.triggers[k];
        }
        for (int j = 0; j <= spec.T; ++j) {
            s.error_samples[j].insert(s.error_samples[j].end(), t.error_samples[j].begin(), t.error_samples[j].end());
            s.open_loop_samples[j].insert(s.open_loop_samples[j].end(), t.open_loop_samples[j].begin(),
                                          t.open_loop_samples[j].end());
        }
        for (int n = 0; n < spec.T; ++n) {
            s.at_risk[n] += t.at_risk[n];
            s.survived[n] += t.survived[n];
            s.at_risk_first[n] += t.at_risk_first[n];
            s.survived_first[n] += t.survived_first[n];
        }
    }
    s.acr.method = "monte-carlo";
    s.acr.values.reserve(triggers.size());
    for (auto c : triggers) {
        s.acr.values.push_back(static_cast<double>(c) / options.trials);
    }
    return s;
}

std::vector<FrequencyEstimate> conditional_frequencies(const McSummary& summary, int T, bool first_run_only)
{
    const auto& risk = first_run_only ? summary.at_risk_first : summary.at_risk;
    const auto& kept = first_run_only ? summary.survived_first : summary.survived;
    if (T < 1 || T > static_cast<int>(risk.size())) {
        throw Error(ErrorKind::InvalidParameter, "requested depth exceeds the summary's maximum interval");
    }
    std::vector<FrequencyEstimate> out;
    for (int n = 0; n < T; ++n) {
        FrequencyEstimate f;
        f.runs = risk[n];
        f.value = risk[n] > 0 ? static_cast<double>(kept[n]) / static_cast<double>(risk[n]) : 0.0;
        f.low_confidence = risk[n] < kMinRunsForConfidence;
        out.push_back(f);
    }
    return out;
}

double sample_mean(const std::vector<double>& xs)
{
    if (xs.empty()) {
        return 0.0;
    }
    return std::accumulate(xs.begin(), xs.end(), 0.0) / static_cast<double>(xs.size());
}

double sample_variance(const std::vector<double>& xs)
{
    if (xs.size() < 2) {
        return 0.0;
    }
    const double m = sample_mean(xs);
    double acc = 0.0;
    for (double v : xs) {
        acc += (v - m) * (v - m);
    }
    return acc / static_cast<double>(xs.size() - 1);
}

}  // namespace netacr

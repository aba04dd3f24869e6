#include "netacr/platoon.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "netacr/coeffs.hpp"
#include "netacr/rng.hpp"
#include "parallel.hpp"

namespace netacr {

namespace {

// stream index reserved for the particle model, disjoint from trial indices
constexpr std::uint64_t kModelStream = std::numeric_limits<std::uint64_t>::max();

struct PlatoonTally {
    std::vector<std::int64_t> triggers;
    std::vector<double> position;
    std::vector<double> velocity;

    explicit PlatoonTally(int steps)
        : triggers(steps + 1, 0), position(steps + 1, 0.0), velocity(steps + 1, 0.0)
    {
    }
};

void run_trial(const PlatoonConfig& cfg, std::uint64_t seed, PlatoonTally& out)
{
    Engine rng(seed);
    std::normal_distribution<double> noise(0.0, cfg.sigma);
    const int steps = cfg.steps();
    const double dt = cfg.dt;

    double p = 0.0;
    double v = 0.0;
    double p_hat = 0.0;
    double v_hat = 0.0;
    int last_sample = 0;
    int delta = 1;
    for (int k = 0;; ++k) {
        out.triggers[k] += delta;
        out.position[k] += p;
        out.velocity[k] += v;
        if (k == steps) {
            break;
        }
        const double u = control_law(p_hat, v_hat, leader_ref(k * dt), cfg);
        const double error = v - v_hat;
        const double w = noise(rng);

        const double p_next = p + dt * v;
        const double v_next = v + dt * u + w;
        p_hat += dt * v_hat;
        v_hat += dt * u;
        p = p_next;
        v = v_next;

        delta = (std::abs(error) >= cfg.eta || (k + 1) - last_sample > cfg.T) ? 1 : 0;
        if (delta == 1) {
            last_sample = k + 1;
            v_hat = v;
        }
    }
}

}  // namespace

void PlatoonConfig::validate() const
{
    auto fail = [](const char* field, const char* why) {
        throw Error(ErrorKind::InvalidParameter, std::string(field) + ": " + why);
    };
    if (!(dt > 0.0)) fail("dt", "must be positive");
    if (!(duration > 0.0)) fail("duration", "must be positive");
    if (!(eta > 0.0)) fail("eta", "must be positive");
    if (T < 1) fail("T", "must be at least 1");
    if (!(sigma > 0.0)) fail("sigma", "must be positive");
    if (!(Q != 0.0) || !std::isfinite(Q)) fail("Q", "must be non-zero");
    if (!std::isfinite(gamma) || !std::isfinite(K) || !std::isfinite(d)) fail("gamma/K/d", "must be finite");
    if (trials < 1) fail("trials", "must be positive");
    if (particles < 100) fail("particles", "must be at least 100");
    if (!(bandwidth > 0.0)) fail("bandwidth", "must be positive");
}

int PlatoonConfig::steps() const
{
    return static_cast<int>(std::lround(duration / dt));
}

SystemSpec PlatoonConfig::velocity_spec() const
{
    return SystemSpec{.A = 1.0, .B = dt, .sigma = sigma, .x0 = 0.0, .eta = eta, .T = T};
}

LeaderState leader_ref(double t)
{
    return {-std::cos(t) + 1.2 * t, std::sin(t) + 1.2, std::cos(t)};
}

double control_law(double p, double v, const LeaderState& ref, const PlatoonConfig& cfg)
{
    const double q_inv = 1.0 / cfg.Q;
    return -cfg.gamma * q_inv * v - q_inv * cfg.K * p + cfg.gamma * q_inv * ref.velocity + q_inv * cfg.K * ref.position +
           ref.acceleration + q_inv * cfg.K * cfg.d;
}

PlatoonResult run_platoon(const PlatoonConfig& cfg, std::uint64_t master_seed)
{
    cfg.validate();
    const int steps = cfg.steps();
    const int block = detail::kTrialBlock;
    const std::size_t blocks = (cfg.trials + block - 1) / block;
    std::vector<PlatoonTally> tallies(blocks, PlatoonTally(steps));

    detail::for_each_block(blocks, cfg.threads, [&](std::size_t b) {
        const int first = static_cast<int>(b) * block;
        const int last = std::min(cfg.trials, first + block);
        for (int i = first; i < last; ++i) {
            run_trial(cfg, derive_seed(master_seed, static_cast<std::uint64_t>(i)), tallies[b]);
        }
    });

    PlatoonTally total(steps);
    for (const auto& t : tallies) {
        for (int k = 0; k <= steps; ++k) {
            total.triggers[k] += t.triggers[k];
            total.position[k] += t.position[k];
            total.velocity[k] += t.velocity[k];
        }
    }

    PlatoonResult out;
    const double n = cfg.trials;
    out.acr_gt.method = "monte-carlo";
    for (int k = 0; k <= steps; ++k) {
        const double t = k * cfg.dt;
        const auto ref = leader_ref(t);
        out.acr_gt.values.push_back(static_cast<double>(total.triggers[k]) / n);
        out.tracking.push_back({t, total.position[k] / n - ref.position, total.velocity[k] / n, ref.velocity});
    }
    out.acr_gt.stationary = tail_average(out.acr_gt.values);

    const SystemSpec spec = cfg.velocity_spec();
    const auto model = particle_coefficients(
        spec, {.particles = cfg.particles, .bandwidth = cfg.bandwidth, .seed = derive_seed(master_seed, kModelStream)});
    out.acr_model = recursive_acr(model, steps);
    out.acr_model.diagnostics.insert(out.acr_model.diagnostics.end(), model.diagnostics.begin(),
                                     model.diagnostics.end());
    out.acr_openloop = recursive_acr(open_loop_coefficients(spec), steps);
    return out;
}

double tail_average(std::span<const double> values)
{
    if (values.empty()) {
        return 0.0;
    }
    const int last = static_cast<int>(values.size()) - 1;
    const int first = static_cast<int>(std::ceil(0.75 * last));
    double acc = 0.0;
    for (int k = first; k <= last; ++k) {
        acc += values[k];
    }
    return acc / (last - first + 1);
}

std::vector<SweepPoint> threshold_sweep(const PlatoonConfig& base, std::span<const double> etas,
                                        std::uint64_t master_seed)
{
    std::vector<SweepPoint> out;
    for (double eta : etas) {
        if (!(eta > 0.0)) {
            throw Error(ErrorKind::InvalidParameter, "sweep thresholds must be positive");
        }
        PlatoonConfig cfg = base;
        cfg.eta = eta;
        SweepPoint pt;
        pt.result = run_platoon(cfg, master_seed);
        pt.row.eta = eta;
        pt.row.model_stationary = pt.result.acr_model.stationary.value_or(0.0);
        pt.row.open_loop_stationary = pt.result.acr_openloop.stationary.value_or(0.0);
        pt.row.gt_tail = pt.result.acr_gt.stationary.value_or(0.0);
        pt.row.ratio = pt.row.open_loop_stationary / pt.row.model_stationary;
        out.push_back(std::move(pt));
    }
    return out;
}

}  // namespace netacr

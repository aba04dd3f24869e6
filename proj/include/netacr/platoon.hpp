#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "netacr/acr_model.hpp"
#include "netacr/system_spec.hpp"

namespace netacr {

/// Leader-follower scenario: double-integrator follower tracking p_L(t) = -cos t + 1.2 t at gap d,
/// with event-triggered sampling of the follower velocity.
struct PlatoonConfig {
    double d = 3.0;
    double gamma = 1.0;
    double Q = 1.0;
    double K = 1.0;
    double dt = 0.1;
    double duration = 40.0;
    double eta = 1.0;
    int T = 20;
    double sigma = 1.0;  ///< velocity noise std per step (m/s)
    int trials = 10000;
    int particles = 10000;
    double bandwidth = 0.1;
    unsigned threads = 0;

    void validate() const;
    [[nodiscard]] int steps() const;
    /// Scalar system seen by the velocity scheduler: A = 1, B = dt.
    [[nodiscard]] SystemSpec velocity_spec() const;
};

struct LeaderState {
    double position = 0.0;
    double velocity = 0.0;
    double acceleration = 0.0;
};

LeaderState leader_ref(double t);

/// Tracking law evaluated on the (estimated) follower state.
double control_law(double p, double v, const LeaderState& ref, const PlatoonConfig& cfg);

struct TrackingRow {
    double t = 0.0;
    double mean_gap = 0.0;       ///< E(p) - p_L
    double mean_velocity = 0.0;  ///< E(v)
    double leader_velocity = 0.0;
};

struct PlatoonResult {
    AcrSeries acr_gt;
    AcrSeries acr_model;
    AcrSeries acr_openloop;
    std::vector<TrackingRow> tracking;
};

PlatoonResult run_platoon(const PlatoonConfig& cfg, std::uint64_t master_seed);

/// Mean of the series over the last quarter of its horizon.
double tail_average(std::span<const double> values);

struct SweepRow {
    double eta = 0.0;
    double model_stationary = 0.0;
    double open_loop_stationary = 0.0;
    double gt_tail = 0.0;
    double ratio = 0.0;  ///< open-loop / model
};

struct SweepPoint {
    SweepRow row;
    PlatoonResult result;
};

std::vector<SweepPoint> threshold_sweep(const PlatoonConfig& base, std::span<const double> etas,
                                        std::uint64_t master_seed);

}  // namespace netacr

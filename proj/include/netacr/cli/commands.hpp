#pragma once

#include "netacr/cli/config.hpp"
#include "netacr/cli/output.hpp"

namespace netacr::cli {

/// Rows (method, n, pbar, p) for n = 1..T.
Document cmd_coeffs(const RunConfig& cfg);

/// Rows k = 0..horizon with one column per method, then "stationary" and "jury_stable" rows.
Document cmd_acr(const RunConfig& cfg);

/// Every method side by side, error moments per step, and gridded densities for k = 2..5.
Document cmd_compare(const RunConfig& cfg);

/// Threshold sweep table, per-threshold ACR trajectories, and mean tracking trajectory.
Document cmd_platoon(const RunConfig& cfg);

/// Full command-line entry point. Returns 0 on success, 2 on configuration errors, 1 otherwise.
int run(int argc, const char* const* argv);

}  // namespace netacr::cli

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <vector>

#include "netacr/dist.hpp"
#include "netacr/platoon.hpp"
#include "netacr/system_spec.hpp"

namespace netacr::cli {

enum class Format { Csv, Json };

/// Everything one invocation needs. Defaults reproduce the scalar example
/// (A = 1.25, B = 1, sigma = 1, x0 = -2, eta = 1, T = 5, N = 10^4, bandwidth 0.1, 10^4 trials).
struct RunConfig {
    SystemSpec system;
    std::string method = "quadrature";
    int horizon = 10;
    int trials = 10000;
    int particles = 10000;
    double bandwidth = 0.1;
    std::uint64_t seed = 0;
    GridOptions grid;
    unsigned threads = 0;
    Format format = Format::Csv;
    std::string output;  ///< empty = stdout

    PlatoonConfig platoon;
    std::vector<double> sweep{1.0, 2.0, 3.0, 4.0};

    /// Throws Error(Config) naming the first offending key.
    void validate() const;
};

struct KeyInfo {
    std::string name;
    std::string help;
    std::function<void(RunConfig&, const std::string&)> set;
    std::function<std::string(const RunConfig&)> get;
    bool echoed = true;  ///< part of the serialized config (threads and output path are not)
};

/// All recognised keys in documentation order.
const std::vector<KeyInfo>& keys();

/// Sets one key from its text form. Throws Error(Config) on unknown keys or malformed values.
void apply(RunConfig& cfg, std::string_view key, std::string_view value);

/// Parses `key = value` lines; `#` starts a comment, blank lines are ignored.
RunConfig parse_config(std::string_view text, RunConfig base = {});

RunConfig load_config(const std::string& path);

const std::vector<std::string>& method_names();

}  // namespace netacr::cli

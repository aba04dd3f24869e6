#include "netacr/cli/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include <fmt/format.h>

namespace netacr::cli {

namespace {

[[noreturn]] void config_error(std::string_view key, std::string_view why)
{
    throw Error(ErrorKind::Config, fmt::format("{}: {}", key, why));
}

std::string_view trim(std::string_view s)
{
    const auto first = s.find_first_not_of(" \t\r");
    if (first == std::string_view::npos) {
        return {};
    }
    const auto last = s.find_last_not_of(" \t\r");
    return s.substr(first, last - first + 1);
}

double to_double(const std::string& key, const std::string& text)
{
    double v = 0.0;
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end || !std::isfinite(v)) {
        config_error(key, fmt::format("expected a finite number, got '{}'", text));
    }
    return v;
}

template <typename Int>
Int to_int(const std::string& key, const std::string& text)
{
    Int v{};
    const char* end = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(text.data(), end, v);
    if (ec != std::errc() || ptr != end) {
        config_error(key, fmt::format("expected an integer, got '{}'", text));
    }
    return v;
}

std::string num(double v)
{
    return fmt::format("{}", v);
}

std::vector<double> to_list(const std::string& key, const std::string& text)
{
    std::vector<double> out;
    std::string_view rest = text;
    while (true) {
        const auto comma = rest.find(',');
        const auto item = trim(rest.substr(0, comma));
        if (item.empty()) {
            config_error(key, "expected a comma-separated list of numbers");
        }
        out.push_back(to_double(key, std::string(item)));
        if (comma == std::string_view::npos) {
            break;
        }
        rest.remove_prefix(comma + 1);
    }
    return out;
}

KeyInfo real(std::string name, std::string help, double RunConfig::*outer)
{
    return {name, std::move(help),
            [name, outer](RunConfig& c, const std::string& v) { c.*outer = to_double(name, v); },
            [outer](const RunConfig& c) { return num(c.*outer); }};
}

template <typename Member>
KeyInfo real_in(std::string name, std::string help, Member RunConfig::*outer, double Member::*inner)
{
    return {name, std::move(help),
            [name, outer, inner](RunConfig& c, const std::string& v) { (c.*outer).*inner = to_double(name, v); },
            [outer, inner](const RunConfig& c) { return num((c.*outer).*inner); }};
}

template <typename Member, typename Int>
KeyInfo int_in(std::string name, std::string help, Member RunConfig::*outer, Int Member::*inner)
{
    return {name, std::move(help),
            [name, outer, inner](RunConfig& c, const std::string& v) { (c.*outer).*inner = to_int<Int>(name, v); },
            [outer, inner](const RunConfig& c) { return fmt::format("{}", (c.*outer).*inner); }};
}

template <typename Int>
KeyInfo integer(std::string name, std::string help, Int RunConfig::*field, bool echoed = true)
{
    return {name, std::move(help),
            [name, field](RunConfig& c, const std::string& v) { c.*field = to_int<Int>(name, v); },
            [field](const RunConfig& c) { return fmt::format("{}", c.*field); }, echoed};
}

std::vector<KeyInfo> build_keys()
{
    std::vector<KeyInfo> k;
    k.push_back(real_in("A", "open-loop gain", &RunConfig::system, &SystemSpec::A));
    k.push_back(real_in("B", "input gain", &RunConfig::system, &SystemSpec::B));
    k.push_back(real_in("sigma", "process noise std", &RunConfig::system, &SystemSpec::sigma));
    k.push_back(real_in("x0", "initial state", &RunConfig::system, &SystemSpec::x0));
    k.push_back(real_in("eta", "triggering threshold", &RunConfig::system, &SystemSpec::eta));
    k.push_back(int_in("T", "maximum silent interval", &RunConfig::system, &SystemSpec::T));
    k.push_back({"method", "quadrature | particle | open-loop | open-loop-particle | monte-carlo | all",
                 [](RunConfig& c, const std::string& v) { c.method = v; },
                 [](const RunConfig& c) { return c.method; }});
    k.push_back(integer("horizon", "last step k reported", &RunConfig::horizon));
    k.push_back(integer("trials", "Monte Carlo trials", &RunConfig::trials));
    k.push_back(integer("particles", "particle count N", &RunConfig::particles));
    k.push_back(real("bandwidth", "kernel bandwidth", &RunConfig::bandwidth));
    k.push_back(integer("seed", "master seed", &RunConfig::seed));
    k.push_back(int_in("grid.nodes", "quadrature grid nodes (odd)", &RunConfig::grid, &GridOptions::nodes));
    k.push_back(real_in("grid.tail_sigmas", "noise stds kept beyond the support", &RunConfig::grid,
                        &GridOptions::tail_sigmas));
    k.push_back(integer("threads", "worker threads, 0 = all cores", &RunConfig::threads, false));
    k.push_back({"format", "csv | json",
                 [](RunConfig& c, const std::string& v) {
                     if (v == "csv") {
                         c.format = Format::Csv;
                     } else if (v == "json") {
                         c.format = Format::Json;
                     } else {
                         config_error("format", fmt::format("expected csv or json, got '{}'", v));
                     }
                 },
                 [](const RunConfig& c) { return std::string(c.format == Format::Csv ? "csv" : "json"); }});
    k.push_back({"output", "output path, empty = stdout", [](RunConfig& c, const std::string& v) { c.output = v; },
                 [](const RunConfig& c) { return c.output; }, false});
    k.push_back(real_in("platoon.d", "desired gap (m)", &RunConfig::platoon, &PlatoonConfig::d));
    k.push_back(real_in("platoon.gamma", "velocity gain", &RunConfig::platoon, &PlatoonConfig::gamma));
    k.push_back(real_in("platoon.Q", "control weight", &RunConfig::platoon, &PlatoonConfig::Q));
    k.push_back(real_in("platoon.K", "position gain", &RunConfig::platoon, &PlatoonConfig::K));
    k.push_back(real_in("platoon.dt", "sampling period (s)", &RunConfig::platoon, &PlatoonConfig::dt));
    k.push_back(real_in("platoon.duration", "simulated time (s)", &RunConfig::platoon, &PlatoonConfig::duration));
    k.push_back(real_in("platoon.eta", "threshold for the tracking run (m/s)", &RunConfig::platoon,
                        &PlatoonConfig::eta));
    k.push_back(int_in("platoon.T", "maximum silent interval", &RunConfig::platoon, &PlatoonConfig::T));
    k.push_back(real_in("platoon.sigma", "velocity noise std (m/s)", &RunConfig::platoon, &PlatoonConfig::sigma));
    k.push_back(int_in("platoon.trials", "Monte Carlo trials", &RunConfig::platoon, &PlatoonConfig::trials));
    k.push_back(int_in("platoon.particles", "particle count N", &RunConfig::platoon, &PlatoonConfig::particles));
    k.push_back(real_in("platoon.bandwidth", "kernel bandwidth", &RunConfig::platoon, &PlatoonConfig::bandwidth));
    k.push_back({"platoon.sweep", "comma-separated thresholds",
                 [](RunConfig& c, const std::string& v) { c.sweep = to_list("platoon.sweep", v); },
                 [](const RunConfig& c) {
                     std::string out;
                     for (std::size_t i = 0; i < c.sweep.size(); ++i) {
                         out += (i ? "," : "") + num(c.sweep[i]);
                     }
                     return out;
                 }});
    return k;
}

}  // namespace

const std::vector<std::string>& method_names()
{
    static const std::vector<std::string> names{"quadrature", "particle", "open-loop", "open-loop-particle",
                                                "monte-carlo", "all"};
    return names;
}

const std::vector<KeyInfo>& keys()
{
    static const std::vector<KeyInfo> table = build_keys();
    return table;
}

void apply(RunConfig& cfg, std::string_view key, std::string_view value)
{
    const auto& table = keys();
    const auto it = std::find_if(table.begin(), table.end(), [&](const KeyInfo& k) { return k.name == key; });
    if (it == table.end()) {
        config_error(key, "unknown key");
    }
    it->set(cfg, std::string(trim(value)));
}

RunConfig parse_config(std::string_view text, RunConfig base)
{
    int line_no = 0;
    std::istringstream in{std::string(text)};
    std::string line;
    while (std::getline(in, line)) {
        ++line_no;
        std::string_view view = line;
        if (const auto hash = view.find('#'); hash != std::string_view::npos) {
            view = view.substr(0, hash);
        }
        view = trim(view);
        if (view.empty()) {
            continue;
        }
        const auto eq = view.find('=');
        if (eq == std::string_view::npos) {
            config_error(fmt::format("line {}", line_no), "expected 'key = value'");
        }
        apply(base, trim(view.substr(0, eq)), view.substr(eq + 1));
    }
    return base;
}

RunConfig load_config(const std::string& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        config_error("config", fmt::format("cannot read '{}'", path));
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

void RunConfig::validate() const
{
    try {
        system.validate();
        platoon.validate();
    } catch (const Error& e) {
        throw Error(ErrorKind::Config, e.what());
    }
    if (grid.nodes < 3 || grid.nodes % 2 == 0) config_error("grid.nodes", "must be odd and at least 3");
    if (!(grid.tail_sigmas > 0.0)) config_error("grid.tail_sigmas", "must be positive");
    const auto& names = method_names();
    if (std::find(names.begin(), names.end(), method) == names.end()) {
        config_error("method", fmt::format("unknown method '{}'", method));
    }
    if (horizon < 0) config_error("horizon", "must be non-negative");
    if (trials < 1) config_error("trials", "must be positive");
    if (particles < 100) config_error("particles", "must be at least 100");
    if (!(bandwidth > 0.0)) config_error("bandwidth", "must be positive");
    if (sweep.empty()) config_error("platoon.sweep", "must list at least one threshold");
    for (double eta : sweep) {
        if (!(eta > 0.0)) config_error("platoon.sweep", "thresholds must be positive");
    }
}

}  // namespace netacr::cli

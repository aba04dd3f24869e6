#include "netacr/cli/commands.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <map>

#include <fmt/format.h>

#include "CLI11.hpp"
#include "netacr/acr_model.hpp"
#include "netacr/coeffs.hpp"
#include "netacr/netscs_sim.hpp"
#include "netacr/platoon.hpp"
#include "netacr/rng.hpp"

namespace netacr::cli {

namespace {

constexpr std::uint64_t kParticleStream = 0xA5A5'0000'0000'0001ULL;
constexpr std::uint64_t kOpenParticleStream = 0xA5A5'0000'0000'0002ULL;
constexpr int kPdfPoints = 401;

const std::vector<std::string> kAnalytic{"quadrature", "particle", "open-loop", "open-loop-particle"};

std::vector<std::string> selected_methods(const RunConfig& cfg)
{
    if (cfg.method != "all") {
        return {cfg.method};
    }
    std::vector<std::string> all{"monte-carlo"};
    all.insert(all.end(), kAnalytic.begin(), kAnalytic.end());
    return all;
}

CoeffSet coefficients(const RunConfig& cfg, const std::string& method)
{
    if (method == "quadrature") {
        return quadrature_coefficients(cfg.system, cfg.grid);
    }
    if (method == "open-loop") {
        return open_loop_coefficients(cfg.system);
    }
    const bool open = method == "open-loop-particle";
    return particle_coefficients(cfg.system, {.particles = cfg.particles,
                                              .bandwidth = cfg.bandwidth,
                                              .seed = derive_seed(cfg.seed, open ? kOpenParticleStream : kParticleStream),
                                              .open_loop = open});
}

McSummary monte_carlo(const RunConfig& cfg, int horizon)
{
    return monte_carlo_acr(cfg.system, state_feedback(),
                           {.horizon = horizon, .trials = cfg.trials, .master_seed = cfg.seed, .threads = cfg.threads});
}

void absorb(Document& doc, const std::string& method, const std::vector<std::string>& notes)
{
    for (const auto& n : notes) {
        doc.diagnostics.push_back(method + ": " + n);
    }
}

struct MethodSeries {
    std::string method;
    AcrSeries acr;
    std::optional<JuryReport> jury;
};

std::vector<MethodSeries> all_series(const RunConfig& cfg, const std::vector<std::string>& methods, Document& doc)
{
    std::vector<MethodSeries> out;
    for (const auto& m : methods) {
        MethodSeries s{m, {}, std::nullopt};
        if (m == "monte-carlo") {
            s.acr = monte_carlo(cfg, std::max(cfg.horizon, 1)).acr;
            s.acr.values.resize(cfg.horizon + 1);
            s.acr.stationary = tail_average(s.acr.values);
        } else {
            const auto c = coefficients(cfg, m);
            absorb(doc, m, c.diagnostics);
            s.acr = recursive_acr(c, cfg.horizon);
            s.jury = jury_stable(characteristic_polynomial(c));
        }
        absorb(doc, m, s.acr.diagnostics);
        out.push_back(std::move(s));
    }
    return out;
}

Table acr_table(const std::vector<MethodSeries>& series, int horizon)
{
    Table t{"acr", {"k"}, {}};
    for (const auto& s : series) {
        t.columns.push_back(s.method);
    }
    for (int k = 0; k <= horizon; ++k) {
        std::vector<Cell> row{std::int64_t{k}};
        for (const auto& s : series) {
            row.emplace_back(s.acr.values[k]);
        }
        t.rows.push_back(std::move(row));
    }
    std::vector<Cell> stationary{std::string("stationary")};
    std::vector<Cell> jury{std::string("jury_stable")};
    for (const auto& s : series) {
        stationary.emplace_back(s.acr.stationary.value_or(std::nan("")));
        if (s.jury) {
            jury.emplace_back(std::int64_t{s.jury->stable ? 1 : 0});
        } else {
            jury.emplace_back(std::string());
        }
    }
    t.rows.push_back(std::move(stationary));
    t.rows.push_back(std::move(jury));
    return t;
}

Table stationary_table(const std::vector<MethodSeries>& series)
{
    Table t{"stationary", {"method", "stationary", "jury_stable", "failed_rules"}, {}};
    for (const auto& s : series) {
        std::string rules;
        for (int r : s.jury ? s.jury->failed_rules : std::vector<int>{}) {
            rules += (rules.empty() ? "" : " ") + std::to_string(r);
        }
        t.rows.push_back({s.method, s.acr.stationary.value_or(std::nan("")),
                          s.jury ? Cell{std::int64_t{s.jury->stable ? 1 : 0}} : Cell{std::string()}, rules});
    }
    return t;
}

double fourth_central(const std::vector<double>& xs, double mean)
{
    double acc = 0.0;
    for (double v : xs) {
        const double d = v - mean;
        acc += d * d * d * d;
    }
    return xs.empty() ? 0.0 : acc / static_cast<double>(xs.size());
}

/// Standard error of the sample variance.
double variance_se(const std::vector<double>& xs)
{
    if (xs.size() < 2) {
        return std::nan("");
    }
    const double var = sample_variance(xs);
    const double m4 = fourth_central(xs, sample_mean(xs));
    return std::sqrt(std::max(0.0, m4 - var * var) / static_cast<double>(xs.size()));
}

void pdf_rows(Table& t, int k, const std::string& kind, const GridPdf& pdf)
{
    const int stride = std::max(1, (pdf.size() - 1) / (kPdfPoints - 1));
    for (int i = 0; i < pdf.size(); i += stride) {
        t.rows.push_back({std::int64_t{k}, kind, pdf.node(i), pdf.values()[i]});
    }
}

}  // namespace

Document cmd_coeffs(const RunConfig& cfg)
{
    Document doc{"coeffs", {}, {}};
    Table t{"coeffs", {"method", "n", "pbar", "p"}, {}};
    for (const auto& m : selected_methods(cfg)) {
        CoeffSet c;
        if (m == "monte-carlo") {
            const auto summary = monte_carlo(cfg, std::max(cfg.horizon, 10 * cfg.system.T));
            const auto freq = conditional_frequencies(summary, cfg.system.T);
            for (std::size_t n = 0; n < freq.size(); ++n) {
                c.pbar.push_back(freq[n].value);
                if (freq[n].low_confidence) {
                    doc.diagnostics.push_back(
                        fmt::format("monte-carlo: only {} runs reached n={}", freq[n].runs, n + 1));
                }
            }
            c.p = stack(c.pbar);
        } else {
            c = coefficients(cfg, m);
            absorb(doc, m, c.diagnostics);
        }
        for (int n = 0; n < c.horizon(); ++n) {
            t.rows.push_back({m, std::int64_t{n + 1}, c.pbar[n], c.p[n]});
        }
    }
    doc.tables.push_back(std::move(t));
    return doc;
}

Document cmd_acr(const RunConfig& cfg)
{
    Document doc{"acr", {}, {}};
    const auto series = all_series(cfg, selected_methods(cfg), doc);
    doc.tables.push_back(acr_table(series, cfg.horizon));
    doc.tables.push_back(stationary_table(series));
    return doc;
}

Document cmd_compare(const RunConfig& cfg)
{
    Document doc{"compare", {}, {}};
    std::vector<std::string> methods{"monte-carlo"};
    methods.insert(methods.end(), kAnalytic.begin(), kAnalytic.end());
    const auto series = all_series(cfg, methods, doc);
    doc.tables.push_back(acr_table(series, cfg.horizon));
    doc.tables.push_back(stationary_table(series));

    const auto& spec = cfg.system;
    const auto closed = closed_loop_error_pdfs(spec, cfg.grid);
    const auto summary = monte_carlo(cfg, std::max(cfg.horizon, 1));
    Table mom{"moments",
              {"k", "mean_closed", "var_closed", "mean_open", "var_open", "mc_mean_closed", "mc_var_closed",
               "mc_var_closed_se", "mc_var_open", "mc_samples"},
              {}};
    for (int k = 1; k <= spec.T; ++k) {
        const auto m = moments(closed[k - 1]);
        const auto& es = summary.error_samples[k];
        mom.rows.push_back({std::int64_t{k}, m.mean, m.variance, 0.0, open_loop_variance(spec, k), sample_mean(es),
                            sample_variance(es), variance_se(es), sample_variance(summary.open_loop_samples[k]),
                            static_cast<std::int64_t>(es.size())});
    }
    doc.tables.push_back(std::move(mom));

    Table pdfs{"pdfs", {"k", "kind", "z", "density"}, {}};
    for (int k = 2; k <= std::min(5, spec.T); ++k) {
        pdf_rows(pdfs, k, "closed", closed[k - 1]);
        pdf_rows(pdfs, k, "open", open_loop_error_pdf(spec, k, cfg.grid));
    }
    doc.tables.push_back(std::move(pdfs));
    return doc;
}

Document cmd_platoon(const RunConfig& cfg)
{
    Document doc{"platoon", {}, {}};
    PlatoonConfig base = cfg.platoon;
    base.threads = cfg.threads;
    const auto points = threshold_sweep(base, cfg.sweep, cfg.seed);

    Table sweep{"sweep", {"eta", "model_stationary", "open_loop_stationary", "gt_tail", "ratio"}, {}};
    Table traj{"trajectories", {"k", "t"}, {}};
    for (const auto& p : points) {
        const auto& r = p.row;
        sweep.rows.push_back({r.eta, r.model_stationary, r.open_loop_stationary, r.gt_tail, r.ratio});
        const auto tag = fmt::format("{}", r.eta);
        traj.columns.push_back("gt_eta" + tag);
        traj.columns.push_back("model_eta" + tag);
        traj.columns.push_back("open_loop_eta" + tag);
        absorb(doc, "eta=" + tag, p.result.acr_model.diagnostics);
    }
    const int steps = base.steps();
    for (int k = 0; k <= steps; ++k) {
        std::vector<Cell> row{std::int64_t{k}, k * base.dt};
        for (const auto& p : points) {
            row.emplace_back(p.result.acr_gt.values[k]);
            row.emplace_back(p.result.acr_model.values[k]);
            row.emplace_back(p.result.acr_openloop.values[k]);
        }
        traj.rows.push_back(std::move(row));
    }

    const auto hit = std::find_if(points.begin(), points.end(), [&](const SweepPoint& p) { return p.row.eta == base.eta; });
    const PlatoonResult tracked = hit != points.end() ? hit->result : run_platoon(base, cfg.seed);
    Table tracking{"tracking", {"t", "mean_gap", "mean_velocity", "leader_velocity"}, {}};
    for (const auto& row : tracked.tracking) {
        tracking.rows.push_back({row.t, row.mean_gap, row.mean_velocity, row.leader_velocity});
    }

    doc.tables.push_back(std::move(sweep));
    doc.tables.push_back(std::move(traj));
    doc.tables.push_back(std::move(tracking));
    return doc;
}

namespace {

std::string one_line(std::string s)
{
    std::replace(s.begin(), s.end(), '\n', ' ');
    return s;
}

int fail(int code, std::string_view kind, const std::string& message)
{
    std::cerr << "error: " << kind << ": " << one_line(message) << '\n';
    return code;
}

}  // namespace

int run(int argc, const char* const* argv)
{
    CLI::App app{"Average communication rate of event-triggered stochastic control loops", "netacr"};
    app.require_subcommand(1);

    struct Sub {
        const char* name;
        const char* help;
        Document (*fn)(const RunConfig&);
    };
    const std::vector<Sub> subs{
        {"coeffs", "predictive coefficients per method", &cmd_coeffs},
        {"acr", "transient and stationary communication rate", &cmd_acr},
        {"compare", "all methods side by side plus error moments and densities", &cmd_compare},
        {"platoon", "leader-follower threshold sweep", &cmd_platoon},
    };

    std::string config_path;
    std::map<std::string, std::string> overrides;
    std::vector<std::pair<CLI::App*, const Sub*>> apps;
    for (const auto& s : subs) {
        auto* sub = app.add_subcommand(s.name, s.help);
        sub->add_option("--config", config_path, "key = value configuration file");
        for (const auto& key : keys()) {
            sub->add_option_function<std::string>(
                "--" + key.name, [&overrides, name = key.name](const std::string& v) { overrides[name] = v; },
                key.help);
        }
        apps.emplace_back(sub, &s);
    }

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp&) {
        std::cout << app.help();
        return 0;
    } catch (const CLI::CallForAllHelp&) {
        std::cout << app.help("", CLI::AppFormatMode::All);
        return 0;
    } catch (const CLI::ParseError& e) {
        return fail(2, "config", e.what());
    }

    try {
        RunConfig cfg = config_path.empty() ? RunConfig{} : load_config(config_path);
        for (const auto& [key, value] : overrides) {
            apply(cfg, key, value);
        }
        cfg.validate();
        for (const auto& [sub, s] : apps) {
            if (sub->parsed()) {
                emit(s->fn(cfg), cfg);
            }
        }
    } catch (const Error& e) {
        return fail(e.kind() == ErrorKind::Config ? 2 : 1, to_string(e.kind()), e.what());
    } catch (const std::exception& e) {
        return fail(1, "runtime", e.what());
    }
    return 0;
}

}  // namespace netacr::cli

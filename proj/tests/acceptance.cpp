// Acceptance checks: one PASS/FAIL line per criterion.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <random>
#include <sstream>
#include <string>

#include <Eigen/Dense>
#include <fmt/format.h>

#include "netacr/acr_model.hpp"
#include "netacr/coeffs.hpp"
#include "netacr/netscs_sim.hpp"
#include "netacr/platoon.hpp"

using namespace netacr;
namespace fs = std::filesystem;

namespace {

struct Outcome {
    bool pass = true;
    std::string detail;

    void require(bool ok, const std::string& what)
    {
        if (!ok) {
            pass = false;
            detail += (detail.empty() ? "" : "; ") + std::string("failed: ") + what;
        }
    }
    void note(const std::string& what) { detail += (detail.empty() ? "" : "; ") + what; }
};

bool near(double value, double target, double tol)
{
    return std::abs(value - target) <= tol;
}

double variance_se(const std::vector<double>& xs)
{
    const double m = sample_mean(xs);
    const double v = sample_variance(xs);
    double m4 = 0.0;
    for (double x : xs) {
        m4 += std::pow(x - m, 4);
    }
    m4 /= static_cast<double>(xs.size());
    return std::sqrt((m4 - v * v) / static_cast<double>(xs.size()));
}

double trailing_std(const std::vector<double>& xs, int window)
{
    double mean = 0.0;
    for (auto it = xs.end() - window; it != xs.end(); ++it) {
        mean += *it;
    }
    mean /= window;
    double acc = 0.0;
    for (auto it = xs.end() - window; it != xs.end(); ++it) {
        acc += (*it - mean) * (*it - mean);
    }
    return std::sqrt(acc / (window - 1));
}

bool power_decays(const Eigen::MatrixXd& m, int steps)
{
    Eigen::VectorXd v = Eigen::VectorXd::Ones(m.rows()).normalized();
    for (int k = 0; k < steps; ++k) {
        v = m * v;
        if (v.norm() < 1e-8) {
            return true;
        }
    }
    return false;
}

double stationary(const CoeffSet& c)
{
    return stationary_acr(c).value;
}

Outcome ac1()
{
    Outcome o;
    const SystemSpec spec;
    const auto c = quadrature_coefficients(spec);
    const auto s = recursive_acr(c, 5);
    o.require(near(c.pbar[1], 0.6827, 1e-3), fmt::format("pbar2={:.5f}", c.pbar[1]));
    o.require(near(c.pbar[2], 0.5872, 2e-3), fmt::format("pbar3={:.5f}", c.pbar[2]));
    o.require(s.values[1] == 0.0, "E1=0");
    o.require(near(s.values[2], 0.3173, 1e-3), fmt::format("E2={:.5f}", s.values[2]));
    o.require(near(s.values[3], 0.2818, 2e-3), fmt::format("E3={:.5f}", s.values[3]));
    o.note(fmt::format("pbar2={:.4f} pbar3={:.4f} E2={:.4f} E3={:.4f}", c.pbar[1], c.pbar[2], s.values[2],
                       s.values[3]));
    return o;
}

Outcome ac2()
{
    Outcome o;
    const SystemSpec spec;
    const auto pnm = recursive_acr(particle_coefficients(spec, {.particles = 10000, .bandwidth = 0.1, .seed = 0}), 5);
    const auto cam = recursive_acr(open_loop_coefficients(spec), 5);
    const double gt[] = {0.3175, 0.2826, 0.2650, 0.2801};
    const double ol[] = {0.3173, 0.3633, 0.3098, 0.3117};
    std::string p_line = "particle";
    std::string o_line = "open-loop";
    for (int k = 2; k <= 5; ++k) {
        o.require(near(pnm.values[k], gt[k - 2], 0.02), fmt::format("particle E{}={:.4f}", k, pnm.values[k]));
        o.require(near(cam.values[k], ol[k - 2], k <= 3 ? 2e-3 : 0.01),
                  fmt::format("open-loop E{}={:.4f}", k, cam.values[k]));
        p_line += fmt::format(" {:.4f}", pnm.values[k]);
        o_line += fmt::format(" {:.4f}", cam.values[k]);
    }
    o.note(p_line + ", " + o_line);
    return o;
}

Outcome ac3()
{
    Outcome o;
    const SystemSpec spec;
    const auto pdfs = closed_loop_error_pdfs(spec);
    const double v2 = moments(pdfs[1]).variance;
    o.require(near(v2, 1.4549, 0.01), fmt::format("Var(e2 closed)={:.4f}", v2));

    const auto mc = monte_carlo_acr(spec, state_feedback(), {.horizon = 40, .trials = 10000, .master_seed = 0});
    std::string line;
    for (int k = 2; k <= 5; ++k) {
        const auto& xs = mc.error_samples[k];
        const double q = moments(pdfs[k - 1]).variance;
        const double z = (sample_variance(xs) - q) / variance_se(xs);
        o.require(std::abs(z) < 3.0, fmt::format("k={} z={:.2f}", k, z));
        line += fmt::format(" k{}:{:.4f}/{:.4f}", k, sample_variance(xs), q);
    }
    o.require(open_loop_variance(spec, 2) == 2.5625, "Var(e2 open)=2.5625");
    o.require(near(open_loop_variance(spec, 4), 8.8186, 1e-4), "Var(e4 open)");
    o.require(near(open_loop_variance(spec, 5), 14.7791, 1e-4), "Var(e5 open)");
    o.note(fmt::format("Var(e2)={:.4f}, mc/quad{}, open 2.5625 {:.4f} {:.4f}", v2, line, open_loop_variance(spec, 4),
                       open_loop_variance(spec, 5)));
    return o;
}

Outcome ac4()
{
    Outcome o;
    auto check = [&](const CoeffSet& c, const std::string& label) {
        const bool stable = jury_stable(characteristic_polynomial(c)).stable;
        const bool decays = power_decays(companion_matrix(c), 200000);
        o.require(stable == decays, label + " jury/power disagree");
        if (stable) {
            const auto lim = recursion_limit(c);
            o.require(lim.converged && near(lim.value, stationary(c), 1e-6), label + " stationary != limit");
        }
        return stable;
    };
    o.require(check(quadrature_coefficients(SystemSpec{}), "reference"), "reference spec Jury-stable");

    std::mt19937_64 rng(20240601);
    std::uniform_int_distribution<int> horizon(2, 20);
    std::uniform_real_distribution<double> ratio(0.05, 0.999);
    int stable = 0;
    for (int i = 0; i < 100; ++i) {
        std::vector<double> pbar{1.0};
        const int T = horizon(rng);
        while (static_cast<int>(pbar.size()) < T) {
            pbar.push_back(ratio(rng));
        }
        CoeffSet c;
        c.p = stack(pbar);
        c.pbar = pbar;
        stable += check(c, fmt::format("set {}", i));
    }
    o.note(fmt::format("101 sets checked, {} of 100 random sets Jury-stable", stable));
    return o;
}

Outcome ac5()
{
    Outcome o;
    std::mt19937_64 rng(5);
    std::uniform_real_distribution<double> gain(-1.5, 1.5);
    std::uniform_real_distribution<double> noise(0.3, 2.0);
    std::uniform_real_distribution<double> thr(0.3, 3.0);
    double worst_odd = 0.0;
    double worst_mean = 0.0;
    for (int i = 0; i < 50; ++i) {
        SystemSpec spec;
        spec.A = gain(rng);
        spec.sigma = noise(rng);
        spec.eta = thr(rng) * spec.sigma;
        spec.T = 5;
        const auto pdfs = closed_loop_error_pdfs(spec);
        for (int k = 1; k <= spec.T; ++k) {
            const auto& p = pdfs[k - 1];
            const auto vals = p.values();
            for (int j = 0; j < p.size(); ++j) {
                worst_odd = std::max(worst_odd, std::abs(vals[j] - vals[p.size() - 1 - j]));
            }
            const auto m = moments(p);
            worst_mean = std::max(worst_mean, std::abs(m.mean));

            const double tail = 1.0 - integrate(p, -spec.eta, spec.eta);
            if (k < spec.T && tail > 1e-6) {
                o.require(moments(truncate(p, spec.eta)).variance < m.variance,
                          fmt::format("spec {} k={} truncation did not shrink variance", i, k));
            }
            if (k >= 2) {
                o.require(m.variance < open_loop_variance(spec, k),
                          fmt::format("spec {} k={} Var closed >= Var open", i, k));
            }
        }
    }
    o.require(worst_odd <= 1e-9, fmt::format("evenness {:.2e}", worst_odd));
    o.require(worst_mean <= 1e-9, fmt::format("mean {:.2e}", worst_mean));
    o.note(fmt::format("50 specs, max |p(z)-p(-z)|={:.1e}, max |mean|={:.1e}", worst_odd, worst_mean));
    return o;
}

Outcome ac6()
{
    Outcome o;
    const SystemSpec spec;
    const double q = stationary(quadrature_coefficients(spec));
    const double ol = stationary(open_loop_coefficients(spec));
    o.require(ol > q, "reference spec ordering");

    PlatoonConfig cfg;
    cfg.trials = 200;
    std::vector<double> etas;
    for (int i = 1; i <= 12; ++i) {
        etas.push_back(0.5 * i);
    }
    const auto pts = threshold_sweep(cfg, etas, 0);
    double lowest = 1e9;
    for (const auto& p : pts) {
        o.require(p.row.ratio > 1.0, fmt::format("ratio at eta={} is {:.4f}", p.row.eta, p.row.ratio));
        lowest = std::min(lowest, p.row.ratio);
    }
    o.note(fmt::format("reference {:.4f} > {:.4f}; platoon sweep eta 0.5..6 min ratio {:.3f}", ol, q, lowest));
    return o;
}

Outcome ac7()
{
    Outcome o;
    const std::vector<double> etas{1.0, 2.0, 3.0, 4.0};
    const auto pts = threshold_sweep(PlatoonConfig{}, etas, 0);
    std::string line;
    for (std::size_t i = 0; i < pts.size(); ++i) {
        const auto& r = pts[i].result;
        const double sd = trailing_std(r.acr_gt.values, 40);
        o.require(sd < 1e-2, fmt::format("eta={} GT trailing std {:.4f}", etas[i], sd));
        o.require(trailing_std(r.acr_model.values, 40) < 1e-3, fmt::format("eta={} model not converged", etas[i]));
        o.require(trailing_std(r.acr_openloop.values, 40) < 1e-3,
                  fmt::format("eta={} open-loop not converged", etas[i]));
        double worst = 0.0;
        for (std::size_t k = 0; k < r.acr_gt.values.size(); ++k) {
            worst = std::max(worst, std::abs(r.acr_gt.values[k] - r.acr_model.values[k]));
        }
        o.require(worst < 0.03, fmt::format("eta={} model-GT gap {:.4f}", etas[i], worst));
        if (i > 0) {
            o.require(pts[i].row.gt_tail < pts[i - 1].row.gt_tail, fmt::format("GT not decreasing at eta={}", etas[i]));
        }
        line += fmt::format(" eta{}: gt {:.4f} gap {:.4f};", etas[i], pts[i].row.gt_tail, worst);
    }
    double gap = 0.0;
    int n = 0;
    for (const auto& row : pts[0].result.tracking) {
        if (row.t >= 20.0 - 1e-9) {
            gap += row.mean_gap;
            ++n;
        }
    }
    gap /= n;
    o.require(gap >= 2.5 && gap <= 3.5, fmt::format("mean gap {:.3f}", gap));
    o.note(fmt::format("{} mean gap (20-40 s) {:.3f} m", line, gap));
    return o;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

Outcome ac8()
{
    Outcome o;
    const auto dir = fs::temp_directory_path() / "netacr_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
        {"coeffs --method all", {""}},
        {"acr --method all --horizon 30", {"", ".stationary"}},
        {"compare", {"", ".stationary", ".moments", ".pdfs"}},
        {"platoon", {"", ".trajectories", ".tracking"}},
    };
    int compared = 0;
    for (const auto& [args, sides] : runs) {
        const auto name = args.substr(0, args.find(' '));
        for (const char* format : {"csv", "json"}) {
            std::vector<fs::path> outs;
            for (int threads : {1, 4}) {
                const auto out = dir / fmt::format("{}_{}_t{}.{}", name, format, threads, format);
                const auto cmd = fmt::format("{} {} --seed 11 --threads {} --format {} --output {} 2>/dev/null",
                                             NETACR_TOOL, args, threads, format, out.string());
                o.require(std::system(cmd.c_str()) == 0, cmd);
                outs.push_back(out);
            }
            const auto& side_list = std::string(format) == "csv" ? sides : std::vector<std::string>{""};
            for (const auto& side : side_list) {
                auto with = [&](const fs::path& p) {
                    return p.parent_path() / (p.stem().string() + side + p.extension().string());
                };
                const auto a = slurp(with(outs[0]));
                o.require(!a.empty() && a == slurp(with(outs[1])), with(outs[0]).filename().string());
                ++compared;
            }
        }
    }
    o.note(fmt::format("{} output files byte-identical across 1 and 4 threads", compared));
    return o;
}

}  // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"AC1 worked-example reproduction", ac1},  {"AC2 rate table, all methods", ac2},
        {"AC3 error moments", ac3},                 {"AC4 stationary value and stability", ac4},
        {"AC5 truncation properties", ac5},         {"AC6 open-loop overestimation", ac6},
        {"AC7 platoon experiment", ac7},            {"AC8 determinism", ac8},
    };
    int failures = 0;
    for (const auto& [name, fn] : criteria) {
        const auto t0 = std::chrono::steady_clock::now();
        Outcome o;
        try {
            o = fn();
        } catch (const std::exception& e) {
            o.pass = false;
            o.detail = std::string("exception: ") + e.what();
        }
        const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
        failures += o.pass ? 0 : 1;
        std::printf("%s %s (%.1fs): %s\n", o.pass ? "PASS" : "FAIL", name.c_str(), secs, o.detail.c_str());
        std::fflush(stdout);
    }
    return failures == 0 ? 0 : 1;
}

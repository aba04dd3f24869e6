#include "netacr/coeffs.hpp"

#include <cmath>
#include <numbers>

#include "netacr/rng.hpp"

namespace netacr {

namespace {

double first_step_coefficient(const SystemSpec& spec)
{
    return std::erf(spec.eta / (std::numbers::sqrt2 * spec.sigma));
}

CoeffSet finish(std::vector<double> pbar, CoeffMethod method)
{
    CoeffSet out;
    out.p = stack(pbar);
    out.pbar = std::move(pbar);
    out.method = method;
    return out;
}

}  // namespace

const char* to_string(CoeffMethod method) noexcept
{
    switch (method) {
    case CoeffMethod::Quadrature: return "quadrature";
    case CoeffMethod::Particle: return "particle";
    case CoeffMethod::OpenLoop: return "open-loop";
    case CoeffMethod::OpenLoopParticle: return "open-loop-particle";
    }
    return "unknown";
}

std::vector<double> stack(std::span<const double> pbar)
{
    std::vector<double> p;
    p.reserve(pbar.size());
    double acc = 1.0;
    for (double v : pbar) {
        if (!(v >= 0.0 && v <= 1.0)) {
            throw Error(ErrorKind::InvalidParameter, "predictive coefficients must lie in [0, 1]");
        }
        acc *= v;
        p.push_back(acc);
    }
    return p;
}

CoeffSet quadrature_coefficients(const SystemSpec& spec, const GridOptions& grid)
{
    spec.validate();
    std::vector<double> pbar{1.0};
    std::vector<std::string> notes;
    if (spec.T >= 2) {
        const auto pdfs = closed_loop_error_pdfs(spec, grid);
        // pdfs[i] is the density of e_{i+1}; coefficient i+2 integrates it over [-eta, eta]
        for (int i = 0; i + 1 < spec.T; ++i) {
            pbar.push_back(integrate(pdfs[i], -spec.eta, spec.eta));
            if (pdfs[i].normalization_drift() > 1e-6) {
                notes.push_back("renormalization drift " + std::to_string(pdfs[i].normalization_drift()) +
                                " at step " + std::to_string(i + 1));
            }
        }
    }
    auto out = finish(std::move(pbar), CoeffMethod::Quadrature);
    out.diagnostics = std::move(notes);
    return out;
}

CoeffSet particle_coefficients(const SystemSpec& spec, const ParticleOptions& options)
{
    spec.validate();
    if (options.particles < 100) {
        throw Error(ErrorKind::InvalidParameter, "particle count must be at least 100");
    }
    if (!(options.bandwidth > 0.0)) {
        throw Error(ErrorKind::InvalidParameter, "kernel bandwidth must be positive");
    }
    const auto n = static_cast<std::size_t>(options.particles);
    const double eta = spec.eta;
    const double bw = options.bandwidth;

    std::vector<double> pbar{1.0};
    if (spec.T >= 2) {
        pbar.push_back(first_step_coefficient(spec));
    }

    Engine rng = make_engine(options.seed, 0);
    std::normal_distribution<double> unit(0.0, 1.0);
    std::vector<double> z(n);
    for (double& v : z) {
        v = spec.sigma * unit(rng);
    }

    std::vector<std::string> notes;
    std::vector<double> survivors;
    survivors.reserve(n);
    for (int i = 2; i < spec.T; ++i) {
        if (!options.open_loop) {
            survivors.clear();
            for (double v : z) {
                if (std::abs(v) < eta) {
                    survivors.push_back(v);
                }
            }
            if (survivors.empty()) {
                throw Error(ErrorKind::DegenerateTruncation,
                            "all particles removed at step " + std::to_string(i) + "; eta is too small for sigma");
            }
            if (survivors.size() < 100) {
                notes.push_back("only " + std::to_string(survivors.size()) + " particles survived step " +
                                std::to_string(i));
            }
            // exact draw from the kernel mixture: pick a kernel centre, add kernel noise
            std::uniform_int_distribution<std::size_t> pick(0, survivors.size() - 1);
            for (double& v : z) {
                v = survivors[pick(rng)] + bw * unit(rng);
            }
        }
        for (double& v : z) {
            v = spec.A * v + spec.sigma * unit(rng);
        }
        pbar.push_back(kde_mass(z, bw, -eta, eta));
    }

    auto out = finish(std::move(pbar), options.open_loop ? CoeffMethod::OpenLoopParticle : CoeffMethod::Particle);
    out.diagnostics = std::move(notes);
    return out;
}

CoeffSet open_loop_coefficients(const SystemSpec& spec)
{
    spec.validate();
    std::vector<double> pbar{1.0};
    for (int i = 2; i <= spec.T; ++i) {
        const double sd = std::sqrt(open_loop_variance(spec, i - 1));
        pbar.push_back(std::erf(spec.eta / (std::numbers::sqrt2 * sd)));
    }
    return finish(std::move(pbar), CoeffMethod::OpenLoop);
}

}  // namespace netacr

#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "netacr/dist.hpp"
#include "netacr/system_spec.hpp"

namespace netacr {

enum class CoeffMethod {
    Quadrature,
    Particle,
    OpenLoop,
    OpenLoopParticle,
};

const char* to_string(CoeffMethod method) noexcept;

/// Predictive coefficients pbar[n-1] = P(no sample at n | n-1 silent steps since a sample)
/// and their running products p[n-1] (n = 1..T).
struct CoeffSet {
    std::vector<double> pbar;
    std::vector<double> p;
    CoeffMethod method = CoeffMethod::Quadrature;
    std::vector<std::string> diagnostics;

    [[nodiscard]] int horizon() const noexcept { return static_cast<int>(pbar.size()); }
};

/// Running products of the coefficients. Throws on entries outside [0, 1].
std::vector<double> stack(std::span<const double> pbar);

/// Coefficients from the gridded truncate/propagate recursion.
CoeffSet quadrature_coefficients(const SystemSpec& spec, const GridOptions& grid = {});

struct ParticleOptions {
    int particles = 10000;
    double bandwidth = 0.1;
    std::uint64_t seed = 0;
    bool open_loop = false;  ///< skip removal and resampling (conventional numerical variant)
};

/// Particle approximation: remove particles outside (-eta, eta), resample from the
/// kernel estimate, propagate, and integrate the kernel estimate over [-eta, eta].
CoeffSet particle_coefficients(const SystemSpec& spec, const ParticleOptions& options = {});

/// Never-truncated Gaussian coefficients erf(eta / (sqrt(2) sigma_{i-1})).
CoeffSet open_loop_coefficients(const SystemSpec& spec);

}  // namespace netacr

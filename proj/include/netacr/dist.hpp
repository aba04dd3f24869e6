#pragma once

#include <optional>
#include <span>
#include <vector>

#include "netacr/system_spec.hpp"

namespace netacr {

/// Geometry used whenever a density is laid out on a fresh grid.
struct GridOptions {
    int nodes = 4001;            ///< odd, >= 3 (composite Simpson)
    double tail_sigmas = 8.0;    ///< Gaussian tail kept beyond the propagated support
    std::optional<double> half_width;  ///< explicit symmetric support [-w, w], overrides the rule above

    void validate() const;
};

/// Density sampled at n uniformly spaced nodes covering [lo, hi].
class GridPdf {
public:
    GridPdf(double lo, double hi, std::vector<double> values);

    [[nodiscard]] double lo() const noexcept { return lo_; }
    [[nodiscard]] double hi() const noexcept { return hi_; }
    [[nodiscard]] int size() const noexcept { return static_cast<int>(values_.size()); }
    [[nodiscard]] double spacing() const noexcept { return (hi_ - lo_) / (size() - 1); }
    [[nodiscard]] std::span<const double> values() const noexcept { return values_; }

    /// Node k; symmetric supports give exactly antisymmetric node positions.
    [[nodiscard]] double node(int k) const noexcept;

    /// Cubic (4-point Lagrange) interpolation; zero outside [lo, hi].
    [[nodiscard]] double operator()(double z) const noexcept;

    /// Composite Simpson integral over the whole grid.
    [[nodiscard]] double mass() const noexcept;

    /// |1 - mass| observed before the last renormalization of this density.
    [[nodiscard]] double normalization_drift() const noexcept { return drift_; }

    /// Scales to unit mass and records the drift. Throws if the mass is not positive.
    GridPdf& normalize();

private:
    double lo_;
    double hi_;
    std::vector<double> values_;
    double drift_ = 0.0;
};

struct ParticleSet {
    std::vector<double> samples;
    double bandwidth = 0.1;
};

struct Moments {
    double mean = 0.0;
    double variance = 0.0;
};

double normal_cdf(double z) noexcept;
double normal_pdf(double z, double sigma) noexcept;

/// Composite Simpson weights for n (odd) nodes with spacing h.
std::vector<double> simpson_weights(int n, double h);

GridPdf make_gaussian(double sigma, const GridOptions& grid = {});

/// Restricts to the closed interval [-eta, eta] and renormalizes.
GridPdf truncate(const GridPdf& pdf, double eta);

/// Density of A*xi + w with xi ~ pdf_trunc and w ~ N(0, sigma^2), by direct Simpson convolution.
GridPdf propagate(const GridPdf& pdf_trunc, double A, double sigma, const GridOptions& grid = {});

/// Probability mass in [a, b] intersected with the support, clamped to [0, 1].
double integrate(const GridPdf& pdf, double a, double b);

Moments moments(const GridPdf& pdf);

/// Gaussian kernel density estimate with bandwidth particles.bandwidth.
GridPdf kde(const ParticleSet& particles, const GridOptions& grid = {});

/// Mass of the kernel estimate inside [a, b], evaluated exactly through the normal CDF.
double kde_mass(std::span<const double> samples, double bandwidth, double a, double b);

/// Erf-form density of the second closed-loop error (one truncation of N(0, sigma^2)).
GridPdf closed_form_e2_pdf(const SystemSpec& spec, const GridOptions& grid = {});

/// Gaussian density of the never-truncated error e_k; support widens with the accumulated variance.
GridPdf open_loop_error_pdf(const SystemSpec& spec, int k, const GridOptions& grid = {});

/// Variance of e_k: sigma^2 * sum_{n=0}^{k-1} A^{2n}.
double open_loop_variance(const SystemSpec& spec, int k) noexcept;

/// Non-truncated closed-loop error densities p(e_1) .. p(e_T), alternating truncate/propagate.
std::vector<GridPdf> closed_loop_error_pdfs(const SystemSpec& spec, const GridOptions& grid = {});

/// Total-variation distance 0.5 * int |p - q|, evaluated on the nodes of p.
double total_variation(const GridPdf& p, const GridPdf& q);

}  // namespace netacr

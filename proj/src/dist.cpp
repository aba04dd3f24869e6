#include "netacr/dist.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

namespace netacr {

namespace {

constexpr double kMinTailSigmas = 8.0;
constexpr double kMaxPropagationLoss = 1e-8;
constexpr double kMinInteriorMass = 1e-12;

double simpson(std::span<const double> f, double h)
{
    const auto n = f.size();
    double odd = 0.0;
    double even = 0.0;
    for (std::size_t i = 1; i + 1 < n; ++i) {
        (i % 2 == 1 ? odd : even) += f[i];
    }
    return h / 3.0 * (f.front() + f.back() + 4.0 * odd + 2.0 * even);
}

double grid_node(double lo, double hi, int n, int k) noexcept
{
    const double mid = 0.5 * (lo + hi);
    const double c = 0.5 * (n - 1);
    return mid + (k - c) * ((hi - lo) / (n - 1));
}

int odd_nodes_for(double width, double h)
{
    const int cells = std::max(2, 2 * static_cast<int>(std::ceil(width / h)));
    return cells + 1;
}

std::vector<double> resample(const GridPdf& pdf, double a, double b, int n)
{
    std::vector<double> out(n);
    const double step = (b - a) / (n - 1);
    for (int i = 0; i < n; ++i) {
        const double z = (i == n - 1) ? b : a + i * step;
        out[i] = pdf(z);
    }
    return out;
}

}  // namespace

void GridOptions::validate() const
{
    if (nodes < 3 || nodes % 2 == 0) {
        throw Error(ErrorKind::InvalidGrid, "grid nodes must be odd and >= 3, got " + std::to_string(nodes));
    }
    if (!(tail_sigmas > 0.0)) {
        throw Error(ErrorKind::InvalidGrid, "grid tail factor must be positive");
    }
    if (half_width && !(*half_width > 0.0)) {
        throw Error(ErrorKind::InvalidGrid, "grid half width must be positive");
    }
}

GridPdf::GridPdf(double lo, double hi, std::vector<double> values)
    : lo_(lo), hi_(hi), values_(std::move(values))
{
    if (!(lo_ < hi_) || !std::isfinite(lo_) || !std::isfinite(hi_)) {
        throw Error(ErrorKind::InvalidGrid, "grid support requires finite lo < hi");
    }
    if (values_.size() < 3 || values_.size() % 2 == 0) {
        throw Error(ErrorKind::InvalidGrid, "grid node count must be odd and >= 3");
    }
    for (double v : values_) {
        if (!(v >= 0.0) || !std::isfinite(v)) {
            throw Error(ErrorKind::InvalidGrid, "density values must be finite and non-negative");
        }
    }
}

double GridPdf::node(int k) const noexcept
{
    return grid_node(lo_, hi_, size(), k);
}

double GridPdf::operator()(double z) const noexcept
{
    if (z < lo_ || z > hi_) {
        return 0.0;
    }
    const int n = size();
    const double t = (z - 0.5 * (lo_ + hi_)) / spacing() + 0.5 * (n - 1);
    const auto& f = values_;
    double v = 0.0;
    if (n == 3) {
        // quadratic through the three nodes
        const double u = t - 1.0;
        v = f[0] * 0.5 * u * (u - 1.0) + f[1] * (1.0 - u * u) + f[2] * 0.5 * u * (u + 1.0);
    } else {
        const int j = std::clamp(static_cast<int>(std::floor(t)), 1, n - 3);
        const double u = t - j;
        const double wm = -u * (u - 1.0) * (u - 2.0) / 6.0;
        const double w0 = (u + 1.0) * (u - 1.0) * (u - 2.0) / 2.0;
        const double w1 = -(u + 1.0) * u * (u - 2.0) / 2.0;
        const double w2 = (u + 1.0) * u * (u - 1.0) / 6.0;
        v = wm * f[j - 1] + w0 * f[j] + w1 * f[j + 1] + w2 * f[j + 2];
    }
    return std::max(v, 0.0);
}

double GridPdf::mass() const noexcept
{
    return simpson(values_, spacing());
}

GridPdf& GridPdf::normalize()
{
    const double m = mass();
    if (!(m > 0.0) || !std::isfinite(m)) {
        throw Error(ErrorKind::InvalidGrid, "cannot normalize a density with zero mass");
    }
    drift_ = std::abs(1.0 - m);
    for (double& v : values_) {
        v /= m;
    }
    return *this;
}

double normal_cdf(double z) noexcept
{
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
}

double normal_pdf(double z, double sigma) noexcept
{
    const double u = z / sigma;
    return std::exp(-0.5 * u * u) / (sigma * std::sqrt(2.0 * std::numbers::pi));
}

std::vector<double> simpson_weights(int n, double h)
{
    std::vector<double> w(n, 0.0);
    for (int i = 0; i < n; ++i) {
        w[i] = (i == 0 || i == n - 1) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
        w[i] *= h / 3.0;
    }
    return w;
}

GridPdf make_gaussian(double sigma, const GridOptions& grid)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorKind::InvalidParameter, "sigma must be positive");
    }
    grid.validate();
    const double half = grid.half_width.value_or(grid.tail_sigmas * sigma);
    if (half < kMinTailSigmas * sigma * (1.0 - 1e-12)) {
        throw Error(ErrorKind::InvalidGrid, "gaussian support must cover 8 sigma on each side");
    }
    std::vector<double> values(grid.nodes);
    for (int k = 0; k < grid.nodes; ++k) {
        values[k] = normal_pdf(grid_node(-half, half, grid.nodes, k), sigma);
    }
    GridPdf out(-half, half, std::move(values));
    out.normalize();
    return out;
}

GridPdf truncate(const GridPdf& pdf, double eta)
{
    if (!(eta > 0.0)) {
        throw Error(ErrorKind::InvalidParameter, "truncation threshold must be positive");
    }
    const double a = std::max(pdf.lo(), -eta);
    const double b = std::min(pdf.hi(), eta);
    if (a <= pdf.lo() && b >= pdf.hi()) {
        return pdf;
    }
    if (!(a < b)) {
        throw Error(ErrorKind::DegenerateTruncation, "no support inside [-eta, eta]");
    }
    std::vector<double> values = resample(pdf, a, b, pdf.size());
    const double inside = simpson(values, (b - a) / (pdf.size() - 1));
    if (!(inside >= kMinInteriorMass)) {
        throw Error(ErrorKind::DegenerateTruncation,
                    "mass inside [-eta, eta] is negligible; eta lies far in the tail");
    }
    for (double& v : values) {
        v /= inside;
    }
    return GridPdf(a, b, std::move(values));
}

GridPdf propagate(const GridPdf& pdf_trunc, double A, double sigma, const GridOptions& grid)
{
    if (!(sigma > 0.0) || !std::isfinite(sigma)) {
        throw Error(ErrorKind::InvalidParameter, "sigma must be positive");
    }
    if (!std::isfinite(A)) {
        throw Error(ErrorKind::InvalidParameter, "A must be finite");
    }
    grid.validate();
    const double reach = std::max(std::abs(pdf_trunc.lo()), std::abs(pdf_trunc.hi()));
    const double half = grid.half_width.value_or(std::abs(A) * reach + grid.tail_sigmas * sigma);

    const int n_in = pdf_trunc.size();
    const auto w = simpson_weights(n_in, pdf_trunc.spacing());
    std::vector<double> src(n_in);    // A * xi_j
    std::vector<double> coeff(n_in);  // w_j * p(xi_j)
    for (int j = 0; j < n_in; ++j) {
        src[j] = A * pdf_trunc.node(j);
        coeff[j] = w[j] * pdf_trunc.values()[j];
    }

    const double inv_two_var = 1.0 / (2.0 * sigma * sigma);
    const double scale = 1.0 / (sigma * std::sqrt(2.0 * std::numbers::pi));
    std::vector<double> out(grid.nodes);
    for (int k = 0; k < grid.nodes; ++k) {
        const double z = grid_node(-half, half, grid.nodes, k);
        double acc = 0.0;
        for (int j = 0; j < n_in; ++j) {
            const double d = z - src[j];
            acc += coeff[j] * std::exp(-d * d * inv_two_var);
        }
        out[k] = scale * acc;
    }
    GridPdf result(-half, half, std::move(out));
    const double loss = pdf_trunc.mass() - result.mass();
    if (loss > kMaxPropagationLoss) {
        throw Error(ErrorKind::InvalidGrid,
                    "propagated density loses " + std::to_string(loss) + " mass outside the output support");
    }
    result.normalize();
    return result;
}

double integrate(const GridPdf& pdf, double a, double b)
{
    if (a > b) {
        throw Error(ErrorKind::InvalidParameter, "integration bounds require a <= b");
    }
    const double lo = std::max(a, pdf.lo());
    const double hi = std::min(b, pdf.hi());
    if (!(lo < hi)) {
        return 0.0;
    }
    double m = 0.0;
    if (lo <= pdf.lo() && hi >= pdf.hi()) {
        m = pdf.mass();
    } else {
        const int n = odd_nodes_for(hi - lo, pdf.spacing());
        m = simpson(resample(pdf, lo, hi, n), (hi - lo) / (n - 1));
    }
    return std::clamp(m, 0.0, 1.0);
}

Moments moments(const GridPdf& pdf)
{
    const auto w = simpson_weights(pdf.size(), pdf.spacing());
    double m0 = 0.0;
    double m1 = 0.0;
    double m2 = 0.0;
    for (int k = 0; k < pdf.size(); ++k) {
        const double z = pdf.node(k);
        const double p = w[k] * pdf.values()[k];
        m0 += p;
        m1 += z * p;
        m2 += z * z * p;
    }
    const double mean = m1 / m0;
    return {mean, std::max(0.0, m2 / m0 - mean * mean)};
}

GridPdf kde(const ParticleSet& particles, const GridOptions& grid)
{
    if (particles.samples.empty()) {
        throw Error(ErrorKind::InvalidParameter, "kernel density estimate needs at least one particle");
    }
    if (!(particles.bandwidth > 0.0)) {
        throw Error(ErrorKind::InvalidParameter, "kernel bandwidth must be positive");
    }
    grid.validate();
    const double bw = particles.bandwidth;
    std::vector<double> sorted = particles.samples;
    std::ranges::sort(sorted);
    double lo = sorted.front() - grid.tail_sigmas * bw;
    double hi = sorted.back() + grid.tail_sigmas * bw;
    if (grid.half_width) {
        lo = -*grid.half_width;
        hi = *grid.half_width;
    }

    // kernels beyond 10 bandwidths contribute below exp(-50)
    const double cutoff = 10.0 * bw;
    const double inv_two_var = 1.0 / (2.0 * bw * bw);
    const double scale = 1.0 / (std::sqrt(2.0 * std::numbers::pi) * bw * static_cast<double>(sorted.size()));
    std::vector<double> values(grid.nodes);
    for (int k = 0; k < grid.nodes; ++k) {
        const double z = grid_node(lo, hi, grid.nodes, k);
        auto first = std::lower_bound(sorted.begin(), sorted.end(), z - cutoff);
        auto last = std::upper_bound(first, sorted.end(), z + cutoff);
        double acc = 0.0;
        for (auto it = first; it != last; ++it) {
            const double d = z - *it;
            acc += std::exp(-d * d * inv_two_var);
        }
        values[k] = scale * acc;
    }
    GridPdf out(lo, hi, std::move(values));
    out.normalize();
    return out;
}

double kde_mass(std::span<const double> samples, double bandwidth, double a, double b)
{
    if (samples.empty() || !(bandwidth > 0.0) || a > b) {
        throw Error(ErrorKind::InvalidParameter, "kde_mass needs samples, a positive bandwidth and a <= b");
    }
    double acc = 0.0;
    for (double z : samples) {
        acc += normal_cdf((b - z) / bandwidth) - normal_cdf((a - z) / bandwidth);
    }
    return std::clamp(acc / static_cast<double>(samples.size()), 0.0, 1.0);
}

GridPdf closed_form_e2_pdf(const SystemSpec& spec, const GridOptions& grid)
{
    spec.validate();
    grid.validate();
    const double A = spec.A;
    const double s = spec.sigma;
    const double eta = spec.eta;
    const double half = grid.half_width.value_or(std::abs(A) * eta + grid.tail_sigmas * s);
    const double a2 = A * A + 1.0;
    const double root = std::sqrt(a2);
    const double norm = 2.0 * s * std::sqrt(2.0 * std::numbers::pi * a2) * std::erf(eta / (std::numbers::sqrt2 * s));
    const double arg_scale = 1.0 / (std::numbers::sqrt2 * s * root);

    std::vector<double> values(grid.nodes);
    for (int k = 0; k < grid.nodes; ++k) {
        const double z = grid_node(-half, half, grid.nodes, k);
        const double envelope = std::exp(-z * z / (2.0 * s * s * a2));
        const double bracket = std::erf((eta * a2 - A * z) * arg_scale) + std::erf((eta * a2 + A * z) * arg_scale);
        values[k] = envelope * bracket / norm;
    }
    GridPdf out(-half, half, std::move(values));
    out.normalize();
    return out;
}

double open_loop_variance(const SystemSpec& spec, int k) noexcept
{
    double acc = 0.0;
    double gain = 1.0;
    for (int n = 0; n < k; ++n) {
        acc += gain;
        gain *= spec.A * spec.A;
    }
    return spec.sigma * spec.sigma * acc;
}

GridPdf open_loop_error_pdf(const SystemSpec& spec, int k, const GridOptions& grid)
{
    spec.validate();
    if (k < 1) {
        throw Error(ErrorKind::InvalidParameter, "open-loop error index starts at 1");
    }
    GridOptions g = grid;
    g.half_width.reset();
    const double sd = std::sqrt(open_loop_variance(spec, k));
    if (grid.half_width && *grid.half_width >= kMinTailSigmas * sd) {
        g.half_width = grid.half_width;
    }
    return make_gaussian(sd, g);
}

std::vector<GridPdf> closed_loop_error_pdfs(const SystemSpec& spec, const GridOptions& grid)
{
    spec.validate();
    grid.validate();
    GridOptions first = grid;
    if (!first.half_width) {
        first.half_width = std::abs(spec.A) * spec.eta + grid.tail_sigmas * spec.sigma;
    }
    std::vector<GridPdf> pdfs;
    pdfs.reserve(spec.T);
    pdfs.push_back(make_gaussian(spec.sigma, first));
    for (int i = 2; i <= spec.T; ++i) {
        pdfs.push_back(propagate(truncate(pdfs.back(), spec.eta), spec.A, spec.sigma, grid));
    }
    return pdfs;
}

double total_variation(const GridPdf& p, const GridPdf& q)
{
    const double lo = std::min(p.lo(), q.lo());
    const double hi = std::max(p.hi(), q.hi());
    const int n = odd_nodes_for(hi - lo, std::min(p.spacing(), q.spacing()));
    const double h = (hi - lo) / (n - 1);
    std::vector<double> diff(n);
    for (int i = 0; i < n; ++i) {
        const double z = lo + i * h;
        diff[i] = std::abs(p(z) - q(z));
    }
    return 0.5 * simpson(diff, h);
}

}  // namespace netacr

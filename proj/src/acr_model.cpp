#include "netacr/acr_model.hpp"

#include <algorithm>
#include <cmath>

namespace netacr {

namespace {

constexpr int kMaxLimitSteps = 10000;
constexpr double kLimitTolerance = 1e-10;
constexpr double kClampReport = 1e-9;

double next_value(std::span<const double> p, const std::vector<double>& history, int k)
{
    double acc = 1.0;
    const int depth = std::min<int>(k, static_cast<int>(p.size()));
    for (int n = 1; n <= depth; ++n) {
        acc -= p[n - 1] * history[k - n];
    }
    return acc;
}

}  // namespace

AcrSeries recursive_acr(const CoeffSet& coeffs, int horizon)
{
    if (horizon < 0) {
        throw Error(ErrorKind::InvalidParameter, "ACR horizon must be non-negative");
    }
    AcrSeries out;
    out.method = to_string(coeffs.method);
    out.values.reserve(horizon + 1);
    out.values.push_back(1.0);
    double worst = 0.0;
    for (int k = 1; k <= horizon; ++k) {
        const double raw = next_value(coeffs.p, out.values, k);
        const double clamped = std::clamp(raw, 0.0, 1.0);
        worst = std::max(worst, std::abs(raw - clamped));
        out.values.push_back(clamped);
    }
    if (worst > kClampReport) {
        out.diagnostics.push_back("recursion left [0, 1] by " + std::to_string(worst) + "; values clamped");
    }
    const auto st = stationary_acr(coeffs);
    out.stationary = st.value;
    if (st.marginal) {
        out.diagnostics.emplace_back("marginal: characteristic polynomial fails the Jury test");
    }
    return out;
}

StationaryAcr stationary_acr(const CoeffSet& coeffs)
{
    double sum = 0.0;
    for (double v : coeffs.p) {
        sum += v;
    }
    const auto poly = characteristic_polynomial(coeffs);
    return {1.0 / (1.0 + sum), !jury_stable(poly).stable};
}

RecursionLimit recursion_limit(const CoeffSet& coeffs)
{
    const int window = std::max(1, coeffs.horizon());
    std::vector<double> values{1.0};
    values.reserve(kMaxLimitSteps + 1);
    int calm = 0;
    for (int k = 1; k <= kMaxLimitSteps; ++k) {
        values.push_back(next_value(coeffs.p, values, k));
        calm = std::abs(values[k] - values[k - 1]) < kLimitTolerance ? calm + 1 : 0;
        if (calm >= window) {
            return {values.back(), k, true};
        }
    }
    return {values.back(), kMaxLimitSteps, false};
}

JuryReport jury_stable(std::span<const double> poly)
{
    if (poly.size() < 2) {
        throw Error(ErrorKind::InvalidParameter, "Jury test needs a polynomial of degree >= 1");
    }
    if (poly.back() == 0.0) {
        throw Error(ErrorKind::InvalidParameter, "leading coefficient must be non-zero");
    }
    std::vector<double> a(poly.begin(), poly.end());
    if (a.back() < 0.0) {
        for (double& v : a) {
            v = -v;
        }
    }
    const int degree = static_cast<int>(a.size()) - 1;

    JuryReport report;
    report.rows.push_back(a);

    double at_one = 0.0;
    double at_minus_one = 0.0;
    for (int i = degree; i >= 0; --i) {
        at_one += a[i];
        at_minus_one = -at_minus_one + a[i];  // Horner at z = -1
    }
    if (!(at_one > 0.0)) {
        report.failed_rules.push_back(1);
    }
    if (!((degree % 2 == 0 ? at_minus_one : -at_minus_one) > 0.0)) {
        report.failed_rules.push_back(2);
    }
    if (!(std::abs(a.front()) < std::abs(a.back()))) {
        report.failed_rules.push_back(3);
    }
    if (!report.failed_rules.empty()) {
        return report;
    }

    std::vector<double> row = a;
    while (row.size() > 3) {
        const std::size_t m = row.size();
        std::vector<double> next(m - 1);
        for (std::size_t k = 0; k + 1 < m; ++k) {
            next[k] = row[0] * row[k] - row[m - 1 - k] * row[m - 1];
        }
        // positive rescaling keeps every rule comparison and avoids underflow on long arrays
        double scale = 0.0;
        for (double v : next) {
            scale = std::max(scale, std::abs(v));
        }
        if (scale > 0.0) {
            for (double& v : next) {
                v /= scale;
            }
        }
        report.rows.push_back(next);
        if (!(std::abs(next.front()) > std::abs(next.back()))) {
            report.failed_rules.push_back(4);
            return report;
        }
        row = std::move(next);
    }
    report.stable = true;
    return report;
}

std::vector<double> characteristic_polynomial(const CoeffSet& coeffs)
{
    std::vector<double> a(coeffs.p.rbegin(), coeffs.p.rend());
    a.push_back(1.0);
    return a;
}

Eigen::MatrixXd companion_matrix(const CoeffSet& coeffs)
{
    const int t = coeffs.horizon();
    Eigen::MatrixXd m = Eigen::MatrixXd::Zero(t, t);
    for (int i = 0; i + 1 < t; ++i) {
        m(i, i + 1) = 1.0;
    }
    for (int j = 0; j < t; ++j) {
        m(t - 1, j) = -coeffs.p[t - 1 - j];
    }
    return m;
}

}  // namespace netacr

#include "doctest.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include "netacr/dist.hpp"

using namespace netacr;
using doctest::Approx;

namespace {

GridOptions support(double w, int nodes = 4001)
{
    GridOptions g;
    g.nodes = nodes;
    g.half_width = w;
    return g;
}

// 1 - 2 phi(eta) eta / (2 Phi(eta) - 1) for the unit normal truncated to [-eta, eta]
double truncated_normal_variance(double eta)
{
    const double phi = std::exp(-0.5 * eta * eta) / std::sqrt(2.0 * std::numbers::pi);
    return 1.0 - 2.0 * eta * phi / std::erf(eta / std::numbers::sqrt2);
}

double max_asymmetry(const GridPdf& p)
{
    double worst = 0.0;
    const auto v = p.values();
    for (int i = 0; i < p.size(); ++i) {
        worst = std::max(worst, std::abs(v[i] - v[p.size() - 1 - i]));
    }
    return worst;
}

}  // namespace

TEST_CASE("gaussian grid")
{
    const auto g = make_gaussian(1.0, support(9.0));
    CHECK(g.size() == 4001);
    CHECK(g.mass() == Approx(1.0).epsilon(1e-9));
    const auto m = moments(g);
    CHECK(std::abs(m.mean) < 1e-6);
    CHECK(m.variance == Approx(1.0).epsilon(1e-6));
    CHECK(integrate(g, -1.0, 1.0) == Approx(0.682689).epsilon(1e-4));

    const auto wide = make_gaussian(2.0);
    CHECK(integrate(wide, -2.0, 2.0) == Approx(0.682689).epsilon(1e-4));
    CHECK(integrate(wide, wide.lo(), wide.hi()) == Approx(1.0).epsilon(1e-6));

    CHECK_THROWS_AS(make_gaussian(0.0), Error);
    CHECK_THROWS_AS(make_gaussian(1.0, support(4.0)), Error);
    try {
        make_gaussian(1.0, support(4.0));
    } catch (const Error& e) {
        CHECK(e.kind() == ErrorKind::InvalidGrid);
    }
}

TEST_CASE("truncation")
{
    const auto g = make_gaussian(1.0, support(9.0));

    SUBCASE("beyond the support is the identity")
    {
        const auto t = truncate(g, 50.0);
        const auto m = moments(t);
        CHECK(std::abs(m.mean) < 1e-9);
        CHECK(m.variance == Approx(moments(g).variance).epsilon(1e-9));
    }

    SUBCASE("unit threshold matches the truncated normal")
    {
        const auto t = truncate(g, 1.0);
        CHECK(t.lo() == -1.0);
        CHECK(t.hi() == 1.0);
        CHECK(t.mass() == Approx(1.0).epsilon(1e-9));
        const auto m = moments(t);
        CHECK(std::abs(m.mean) < 1e-9);
        CHECK(m.variance == Approx(truncated_normal_variance(1.0)).epsilon(1e-4));
        CHECK(m.variance == Approx(0.2911).epsilon(1e-3));
        CHECK(t(1.5) == 0.0);
    }

    SUBCASE("far tail is degenerate")
    {
        const auto shifted = GridPdf(5.0, 9.0, std::vector<double>(101, 0.25));
        try {
            (void)truncate(shifted, 1.0);
            FAIL("expected degenerate truncation");
        } catch (const Error& e) {
            CHECK(e.kind() == ErrorKind::DegenerateTruncation);
        }
    }
}

TEST_CASE("propagation")
{
    const SystemSpec spec;  // A = 1.25, sigma = 1, eta = 1
    const auto t = truncate(make_gaussian(1.0), 1.0);
    const auto p = propagate(t, spec.A, spec.sigma);

    CHECK(p.mass() == Approx(1.0).epsilon(1e-6));
    CHECK(moments(p).variance == Approx(1.4549).epsilon(0.01 / 1.4549));
    CHECK(moments(p).variance ==
          Approx(spec.A * spec.A * moments(t).variance + spec.sigma * spec.sigma).epsilon(2e-3));
    CHECK(max_asymmetry(p) < 1e-10);

    const auto ref = closed_form_e2_pdf(spec);
    double worst = 0.0;
    for (int i = 0; i < p.size(); ++i) {
        worst = std::max(worst, std::abs(p.values()[i] - ref(p.node(i))));
    }
    CHECK(worst < 1e-6);

    SUBCASE("narrow input acts like a point mass")
    {
        const auto spike = truncate(make_gaussian(1e-3, support(0.01, 201)), 0.01);
        const auto out = propagate(spike, 0.7, 2.0);
        CHECK(moments(out).variance == Approx(4.0).epsilon(1e-5));
        CHECK(integrate(out, -2.0, 2.0) == Approx(0.682689).epsilon(1e-4));
    }

    SUBCASE("output grid too narrow")
    {
        CHECK_THROWS_AS(propagate(t, spec.A, spec.sigma, support(2.0)), Error);
    }
}

TEST_CASE("integration bounds")
{
    const auto g = make_gaussian(std::sqrt(2.5625));
    CHECK(integrate(g, -1.0, 1.0) == Approx(std::erf(1.0 / (std::numbers::sqrt2 * 1.600781))).epsilon(1e-4));
    CHECK(integrate(g, -1.0, 1.0) == Approx(0.4679).epsilon(1e-3));
    CHECK(integrate(g, -100.0, 100.0) == Approx(1.0).epsilon(1e-6));
    CHECK(integrate(g, 0.3, 0.3) == 0.0);
    CHECK_THROWS_AS(integrate(g, 1.0, -1.0), Error);
}

TEST_CASE("kernel density estimate")
{
    SUBCASE("single particle")
    {
        const auto k = kde({{0.0}, 0.1}, support(1.0));
        double worst = 0.0;
        for (int i = 0; i < k.size(); ++i) {
            worst = std::max(worst, std::abs(k.values()[i] - normal_pdf(k.node(i), 0.1)));
        }
        CHECK(worst < 1e-9);
    }

    SUBCASE("symmetric pair")
    {
        const auto k = kde({{-1.0, 1.0}, 0.1});
        CHECK(std::abs(moments(k).mean) < 1e-9);
    }

    SUBCASE("variance adds the bandwidth")
    {
        std::mt19937_64 rng(7);
        std::normal_distribution<double> n01;
        std::vector<double> xs(10000);
        for (double& x : xs) {
            x = n01(rng);
        }
        double mean = 0.0;
        for (double x : xs) {
            mean += x;
        }
        mean /= xs.size();
        double var = 0.0;
        for (double x : xs) {
            var += (x - mean) * (x - mean);
        }
        var /= xs.size();

        const auto k = kde({xs, 0.1});
        const double v = moments(k).variance;
        CHECK(v >= 0.95);
        CHECK(v <= 1.07);
        CHECK(v == Approx(var + 0.01).epsilon(1e-4));
        CHECK(kde_mass(xs, 0.1, -1.0, 1.0) == Approx(integrate(k, -1.0, 1.0)).epsilon(1e-5));
    }

    CHECK_THROWS_AS(kde({{}, 0.1}), Error);
    CHECK_THROWS_AS(kde_mass(std::vector<double>{0.0}, 0.0, -1.0, 1.0), Error);
}

TEST_CASE("kde of a gridded source converges")
{
    // draw 1e5 samples from the propagated e2 density by inverse CDF on its grid
    const SystemSpec spec;
    const auto src = closed_form_e2_pdf(spec);
    std::vector<double> cdf(src.size(), 0.0);
    for (int i = 1; i < src.size(); ++i) {
        cdf[i] = cdf[i - 1] + 0.5 * (src.values()[i] + src.values()[i - 1]) * src.spacing();
    }
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, cdf.back());
    std::vector<double> xs(100000);
    for (double& x : xs) {
        const double r = u(rng);
        const auto it = std::upper_bound(cdf.begin(), cdf.end(), r);
        const int i = std::clamp(static_cast<int>(it - cdf.begin()), 1, src.size() - 1);
        const double f = (r - cdf[i - 1]) / std::max(1e-300, cdf[i] - cdf[i - 1]);
        x = src.node(i - 1) + f * src.spacing();
    }
    const double src_var = moments(src).variance;
    const double kde_var = moments(kde({xs, 0.1})).variance;
    // standard error of a variance estimate: sqrt((m4 - s^4) / n)
    double m4 = 0.0;
    for (double x : xs) {
        m4 += x * x * x * x;
    }
    m4 /= xs.size();
    const double se = std::sqrt((m4 - src_var * src_var) / xs.size());
    CHECK(std::abs(kde_var - (src_var + 0.01)) < 3.0 * se);
}

TEST_CASE("closed-form second error density")
{
    const SystemSpec spec;
    const auto p = closed_form_e2_pdf(spec);
    CHECK(integrate(p, -1.0, 1.0) == Approx(0.5872).epsilon(1e-3 / 0.5872));
    CHECK(moments(p).variance == Approx(1.4549).epsilon(0.005 / 1.4549));
    CHECK(max_asymmetry(p) < 1e-10);

    const SystemSpec other{.A = -0.6, .B = 1.0, .sigma = 0.4, .x0 = 0.0, .eta = 0.3, .T = 4};
    const auto q = closed_form_e2_pdf(other);
    CHECK(max_asymmetry(q) < 1e-10);
    CHECK(q.mass() == Approx(1.0).epsilon(1e-6));
}

TEST_CASE("open-loop error densities")
{
    const SystemSpec spec;
    CHECK(open_loop_variance(spec, 1) == Approx(1.0));
    CHECK(open_loop_variance(spec, 2) == Approx(2.5625).epsilon(1e-12));
    CHECK(open_loop_variance(spec, 4) == Approx(8.818603515625).epsilon(1e-12));
    CHECK(open_loop_variance(spec, 5) == Approx(14.779067993164062).epsilon(1e-12));
    for (int k = 1; k <= 5; ++k) {
        const auto p = open_loop_error_pdf(spec, k);
        CHECK(moments(p).variance == Approx(open_loop_variance(spec, k)).epsilon(1e-6));
        CHECK(p.hi() >= 8.0 * std::sqrt(open_loop_variance(spec, k)));
    }
}

TEST_CASE("closed-loop recursion keeps densities even and normalized")
{
    const SystemSpec spec;
    const auto pdfs = closed_loop_error_pdfs(spec);
    REQUIRE(pdfs.size() == 5);
    for (const auto& p : pdfs) {
        CHECK(p.mass() == Approx(1.0).epsilon(1e-6));
        CHECK(max_asymmetry(p) < 1e-10);
        CHECK(std::abs(moments(p).mean) < 1e-9);
    }
    CHECK(total_variation(pdfs[0], make_gaussian(1.0)) < 1e-9);
    CHECK(total_variation(pdfs[1], closed_form_e2_pdf(spec)) < 1e-5);
}

TEST_CASE("grid validation")
{
    GridOptions g;
    g.nodes = 4000;
    CHECK_THROWS_AS(g.validate(), Error);
    g.nodes = 1;
    CHECK_THROWS_AS(g.validate(), Error);
    CHECK_THROWS_AS(GridPdf(1.0, 0.0, std::vector<double>(3, 1.0)), Error);
    CHECK_THROWS_AS(GridPdf(0.0, 1.0, std::vector<double>{1.0, -1.0, 1.0}), Error);
}

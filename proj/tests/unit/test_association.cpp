#include <doctest.h>

#include "oracles.hpp"

#include "hetnet/association.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/geometry.hpp"
#include "hetnet/montecarlo.hpp"

#include <boost/math/quadrature/gauss_kronrod.hpp>

#include <cmath>
#include <functional>

using namespace hetnet;
using oracle::kPi;

namespace {

double gk(const std::function<double(double)>& f, double a, double b, double tol = 1e-9) {
    return boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, a, b, 12, tol);
}

bool in_unit(double p) { return p >= -1e-9 && p <= 1.0 + 1e-9; }

} // namespace

TEST_CASE("partition identities on the Fig. 3 network") {
    Association a(oracle::fig3());
    const auto p = a.all();
    CHECK(p.g[0] + p.g[1] + p.g[2] == doctest::Approx(1.0).epsilon(1e-4));
    double sum = 0.0;
    for (double v : p.ordered) {
        CHECK(in_unit(v));
        sum += v;
    }
    CHECK(sum == doctest::Approx(1.0).epsilon(1e-3));
    for (int i = 1; i <= 3; ++i) {
        const int j = i % 3 + 1, k = j % 3 + 1;
        CHECK(in_unit(p.g[static_cast<std::size_t>(i - 1)]));
        CHECK(p.g[static_cast<std::size_t>(i - 1)] ==
              doctest::Approx(p.ordered_prob(i, j, k) + p.ordered_prob(i, k, j)).epsilon(1e-3));
        CHECK(a.pairwise_prob(i, j) + a.pairwise_prob(j, i) == doctest::Approx(1.0).epsilon(1e-4));
    }
    CHECK(p.p23 == doctest::Approx(a.pairwise_prob(2, 3)).epsilon(1e-12));
    CHECK(p.p23 + p.p32 == doctest::Approx(1.0).epsilon(1e-4));
}

TEST_CASE("wide clusters reproduce the Poisson association law") {
    auto c = oracle::fig3();
    c.sbs.sigma = 2000.0;
    const auto p = Association(c).all();
    const auto ref = oracle::ppp_association(
        {c.cache_ratio * c.user_intensity, c.sbs.effective_intensity(), c.mbs_intensity}, c.power, c.pathloss);
    for (std::size_t i = 0; i < 3; ++i) CHECK(p.g[i] == doctest::Approx(ref[i]).epsilon(0.02));
}

TEST_CASE("symmetric tiers give uniform orderings") {
    auto c = oracle::fig3();
    const double l = 30.0 / (kPi * 1e6);
    c.user_intensity = l / c.cache_ratio;
    c.sbs = TierLayout::thomas(3.0 / (kPi * 1e6), 10.0, 2000.0);
    c.mbs_intensity = l;
    c.power = {5.0, 5.0, 5.0};
    const auto p = Association(c).all();
    for (double v : p.ordered) CHECK(std::abs(v - 1.0 / 6.0) < 0.005);
}

TEST_CASE("pairwise probability of two Poisson tiers is a thinning ratio") {
    auto c = oracle::fig3();
    c.sbs = TierLayout::poisson(7.0 / (kPi * 1e6));
    c.power = {3.0, 50.0, 50.0};
    Association a(c);
    CHECK(a.pairwise_prob(2, 3) == doctest::Approx(7.0 / 9.0).epsilon(1e-6));
    const auto ref = oracle::ppp_association(
        {c.cache_ratio * c.user_intensity, c.sbs.intensity, c.mbs_intensity}, c.power, c.pathloss);
    const auto p = a.all();
    for (std::size_t i = 0; i < 3; ++i) CHECK(p.g[i] == doctest::Approx(ref[i]).epsilon(1e-6));
    CHECK(p.ordered_prob(1, 2, 3) == doctest::Approx(oracle::ppp_ordered(ref, 1, 2)).epsilon(1e-6));
    CHECK(p.ordered_prob(3, 1, 2) == doctest::Approx(oracle::ppp_ordered(ref, 3, 1)).epsilon(1e-6));
}

TEST_CASE("clustering lowers association to the small cells") {
    const auto c = oracle::fig3();
    const double clustered = Association(c).tier_prob(2);
    const double baseline = Association(c.baseline()).tier_prob(2);
    CHECK(clustered < baseline);
    CHECK(c.baseline().sbs.intensity == doctest::Approx(c.sbs.effective_intensity()));
}

TEST_CASE("association probability grows with the tier's power") {
    auto c = oracle::fig3();
    for (int i = 1; i <= 3; ++i) {
        double prev = 0.0;
        for (double scale : {0.25, 1.0, 4.0}) {
            auto d = c;
            d.power[static_cast<std::size_t>(i - 1)] *= scale;
            const double g = Association(d).tier_prob(i);
            CHECK(g >= prev);
            prev = g;
        }
    }
}

TEST_CASE("serving-distance densities are normalised on the Fig. 4 network") {
    Association a(oracle::fig4(0.1));
    const auto p = a.all();
    for (int i = 1; i <= 3; ++i) {
        const double gi = p.g[static_cast<std::size_t>(i - 1)];
        const double mass = gk([&](double x) { return a.serving_pdf_case1(i, x, gi); }, 0.0, a.support(i));
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
        const double raw = gk([&](double x) { return a.serving_weight_case1(i, x); }, 0.0, a.support(i));
        CHECK(raw == doctest::Approx(gi).epsilon(1e-4));
    }
    for (int i = 2; i <= 3; ++i) {
        const double mass = gk([&](double x) { return a.serving_pdf_case2(i, x); }, 0.0, a.support(i));
        CHECK(mass == doctest::Approx(1.0).epsilon(1e-3));
    }
    for (int j = 2; j <= 3; ++j) {
        const int k = 5 - j;
        const double norm = p.ordered_prob(1, j, k);
        const double c = a.config().reach(1, j);
        const double mass = gk(
            [&](double y) {
                return gk([&](double x) { return a.serving_pdf_case3(j, x, y, norm); }, 0.0,
                          std::min(c * y, a.support(1)), 1e-7);
            },
            0.0, a.support(j), 1e-7);
        CHECK(mass == doctest::Approx(1.0).epsilon(2e-3));
        CHECK(a.serving_pdf_case3(j, 2.0 * c * 0.1, 0.1, norm) == 0.0);
    }
}

TEST_CASE("case-2 density reduces to the Thomas contact law when the macro tier is silent") {
    auto c = oracle::fig3();
    c.power[2] = 1e-12;
    Association a(c);
    const ContactLaw law(c.sbs);
    double sup = 0.0, diff = 0.0;
    for (int k = 1; k <= 200; ++k) {
        const double x = a.support(2) * k / 200.0;
        sup = std::max(sup, law.pdf(x));
        diff = std::max(diff, std::abs(a.serving_pdf_case2(2, x) - law.pdf(x)));
    }
    CHECK(diff / sup < 0.02);
}

TEST_CASE("serving distances match simulated drops") {
    // Independent association rule on sampled tiers (geometry sampler).
    const auto c = oracle::fig3();
    Association a(c);
    const auto p = a.all();
    const double window = association_window(c);
    const int n = 30000;
    std::array<std::vector<double>, 3> case1;
    std::vector<double> case2, case3y;
    for (int r = 0; r < n; ++r) {
        auto g = stream(77, static_cast<std::uint64_t>(r));
        std::array<double, 3> d{};
        for (int t = 1; t <= 3; ++t) {
            const auto layout = c.layout(t);
            double best = std::numeric_limits<double>::infinity();
            for (const auto& q : sample_tier(layout, window, default_guard(layout, window), g))
                best = std::min(best, q.norm());
            d[static_cast<std::size_t>(t - 1)] = best;
        }
        std::array<double, 3> pw{};
        for (std::size_t t = 0; t < 3; ++t) pw[t] = c.power[t] * std::pow(d[t], -c.pathloss);
        const auto win = static_cast<std::size_t>(std::max_element(pw.begin(), pw.end()) - pw.begin());
        case1[win].push_back(d[win]);
        if (pw[1] > pw[2]) case2.push_back(d[1]);
        if (win == 0 && pw[1] > pw[2]) case3y.push_back(d[1]);
    }
    auto chi2 = [&](const std::vector<double>& samples, const std::function<double(double)>& pdf, double hi) {
        // bins equiprobable under the analytic density
        const int bins = 16;
        std::vector<double> cdf{0.0}, xs{0.0};
        const int grid = 4000;
        for (int k = 1; k <= grid; ++k) {
            const double x0 = hi * (k - 1) / grid, x1 = hi * k / grid;
            xs.push_back(x1);
            cdf.push_back(cdf.back() + gk(pdf, x0, x1, 1e-8));
        }
        std::vector<double> edges;
        for (int b = 1; b < bins; ++b) {
            const double target = cdf.back() * b / bins;
            const auto it = std::lower_bound(cdf.begin(), cdf.end(), target);
            edges.push_back(xs[static_cast<std::size_t>(it - cdf.begin())]);
        }
        std::vector<double> obs(bins, 0.0), exp(bins, 0.0);
        for (double v : samples)
            obs[static_cast<std::size_t>(std::upper_bound(edges.begin(), edges.end(), v) - edges.begin())] += 1.0;
        double prev = 0.0;
        for (int b = 0; b < bins; ++b) {
            const double up = b + 1 < bins ? cdf[static_cast<std::size_t>(std::lower_bound(xs.begin(), xs.end(),
                                                                                            edges[static_cast<std::size_t>(b)]) -
                                                                           xs.begin())]
                                           : cdf.back();
            exp[static_cast<std::size_t>(b)] = (up - prev) / cdf.back() * static_cast<double>(samples.size());
            prev = up;
        }
        return chi_square_p(obs, exp);
    };
    for (int i = 1; i <= 3; ++i) {
        const double gi = p.g[static_cast<std::size_t>(i - 1)];
        CHECK(chi2(case1[static_cast<std::size_t>(i - 1)], [&](double x) { return a.serving_pdf_case1(i, x, gi); },
                   a.support(i)) > 0.01);
    }
    CHECK(chi2(case2, [&](double x) { return a.serving_pdf_case2(2, x); }, a.support(2)) > 0.01);
    const double n123 = p.ordered_prob(1, 2, 3);
    const double c12 = c.reach(1, 2);
    CHECK(chi2(case3y,
               [&](double y) {
                   return gk([&](double x) { return a.serving_pdf_case3(2, x, y, n123); }, 0.0, c12 * y, 1e-8);
               },
               a.support(2)) > 0.01);
}

TEST_CASE("association argument checks") {
    Association a(oracle::fig3());
    CHECK_THROWS_AS(a.tier_prob(0), std::invalid_argument);
    CHECK_THROWS_AS(a.ordered_prob(1, 1, 2), std::invalid_argument);
    CHECK_THROWS_AS(a.serving_pdf_case2(1, 10.0), std::invalid_argument);
    CHECK_THROWS_AS(a.serving_pdf_case1(1, 10.0, 0.0), MeasureZeroEvent);
    auto bad = oracle::fig3();
    bad.pathloss = 2.0;
    CHECK_THROWS_AS(Association{bad}, DivergentPathlossError);
    bad = oracle::fig3();
    bad.cache_ratio = 1.5;
    CHECK_THROWS_AS(Association{bad}, ConfigError);
}

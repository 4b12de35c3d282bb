#include <doctest.h>

#include "fixtures.hpp"

#include "hetnet/dpsq.hpp"
#include "hetnet/errors.hpp"
#include "hetnet/montecarlo.hpp"

#include <random>
#include <sstream>

using namespace hetnet;

TEST_CASE("equal weights and rates reduce to M/M/1-PS") {
    std::mt19937_64 g(1);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        const double mu = 0.2 + 5.0 * u(g), w = 0.5 + 2.0 * u(g);
        const int k = 1 + static_cast<int>(4 * u(g));
        const double load = 0.95 * u(g);
        DpsInstance inst;
        for (int c = 0; c < k; ++c) inst.classes.push_back({load * mu / k, mu, w, 0});
        const double rho = inst.load();
        for (std::size_t c = 0; c < inst.classes.size(); ++c)
            CHECK(dps_sojourn(inst, c) == doctest::Approx(1.0 / (mu * (1.0 - rho))).epsilon(1e-14));
    }
    DpsInstance one{{{0.7, 2.0, 13.0, 0}}};
    CHECK(dps_sojourn(one, 0) == doctest::Approx(1.0 / (2.0 * (1.0 - 0.35))).epsilon(1e-14));
}

TEST_CASE("exact DPS oracle") {
    // M/M/1-PS limit and work conservation
    const auto t = oracle::dps_exact({0.3, 0.2}, {1.0, 1.0}, {1.0, 2.0});
    CHECK((0.3 * t[0] + 0.2 * t[1]) / 0.5 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(t[0] == doctest::Approx(50.0 / 23.0).epsilon(1e-12));
    const auto des = dps_des({{{0.3, 1.0, 1.0, 0}, {0.2, 1.0, 2.0, 0}}}, 4000000, 3);
    for (std::size_t i = 0; i < 2; ++i) CHECK(std::abs(t[i] - des.sojourn[i]) <= 4.0 * des.sojourn_se[i]);

    // the interpolation is exact to first order in the load
    std::mt19937_64 g(9);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        DpsInstance inst;
        std::vector<double> l, m, w;
        for (int c = 0; c < 4; ++c) {
            m.push_back(0.5 + 1.5 * u(g));
            w.push_back(1.0 + 1.5 * u(g));
            l.push_back(0.0025 * u(g) * m.back());
            inst.classes.push_back({l.back(), m.back(), w.back(), 0});
        }
        const auto exact = oracle::dps_exact(l, m, w);
        for (std::size_t c = 0; c < 4; ++c) {
            const double excess = exact[c] - 1.0 / m[c];
            CHECK(dps_sojourn(inst, c) - 1.0 / m[c] == doctest::Approx(excess).epsilon(0.02));
        }
    }
}

TEST_CASE("two-class instance against the DES") {
    DpsInstance inst{{{0.3, 1.0, 1.0, 0}, {0.2, 1.0, 2.0, 0}}};
    const auto des = dps_des(inst, 1000000, 11);
    for (std::size_t i = 0; i < 2; ++i) CHECK(dps_sojourn(inst, i) == doctest::Approx(des.sojourn[i]).epsilon(0.10));
    // work conservation: the load-weighted mean is the M/M/1 sojourn
    const double s0 = dps_sojourn(inst, 0), s1 = dps_sojourn(inst, 1);
    CHECK((0.3 * s0 + 0.2 * s1) / 0.5 == doctest::Approx(2.0).epsilon(1e-12));
    CHECK(s0 == doctest::Approx(2.1917).epsilon(1e-4));
    CHECK(s1 == doctest::Approx(1.7125).epsilon(1e-4));
}

TEST_CASE("QoS metrics") {
    DpsInstance mm1{{{0.5, 1.0, 1.0, 3}}, 2};
    const auto rows = qos_metrics(mm1);
    REQUIRE(rows.size() == 1);
    CHECK(*rows[0].n == doctest::Approx(1.0));
    CHECK(*rows[0].d == doctest::Approx(2.0));
    CHECK(*rows[0].t == doctest::Approx(0.5));
    CHECK(rows[0].stable);

    DpsInstance three{{{0.1, 1.3, 1.0, 1}, {0.25, 0.9, 1.7, 3}, {0.05, 2.0, 1.2, 5}}, 2};
    for (const auto& r : qos_metrics(three)) CHECK(*r.n / r.lambda == doctest::Approx(*r.d).epsilon(1e-15));

    DpsInstance hot{{{1.2, 1.0, 1.0, 1}}};
    const auto hr = qos_metrics(hot);
    CHECK_FALSE(hr[0].stable);
    CHECK_FALSE(hr[0].n.has_value());
    std::ostringstream os;
    write_qos_csv(os, qos_metrics(mm1));
    CHECK(os.str() == "tier,class,bh_flag,lambda,mu,weight,rho_prime,N,D,T,stable\nsbs,2,0,0.5,1,1,0.5,1,2,0.5,1\n");
}

TEST_CASE("EPS baseline") {
    DpsInstance inst{{{0.1, 1.3, 1.0, 1}, {0.25, 0.9, 1.7, 2}, {0.05, 2.0, 1.2, 5}}};
    const auto eps = eps_instance(inst);
    DpsInstance ones = inst;
    for (auto& c : ones.classes) c.weight = 1.0;
    for (std::size_t i = 0; i < 3; ++i) CHECK(dps_sojourn(eps, i) == dps_sojourn(ones, i));

    DpsInstance equal{{{0.1, 1.5, 1.0, 0}, {0.3, 1.5, 1.0, 0}, {0.2, 1.5, 1.0, 0}}};
    const double rho = equal.load();
    for (std::size_t i = 0; i < 3; ++i) CHECK(dps_sojourn(equal, i) == doctest::Approx(1.0 / (1.5 * (1.0 - rho))));
    const auto des = dps_des(equal, 400000, 5);
    for (std::size_t i = 0; i < 3; ++i) CHECK(dps_sojourn(equal, i) == doctest::Approx(des.sojourn[i]).epsilon(0.05));
}

TEST_CASE("stability check") {
    CHECK(stability_check(DpsInstance{}).stable);
    DpsInstance hot{{{1.2, 1.0, 1.0, 0}}};
    const auto s = stability_check(hot);
    CHECK_FALSE(s.stable);
    CHECK(s.load == doctest::Approx(1.2));
    CHECK_THROWS_AS(dps_sojourn(hot, 0), UnstableQueueError);
    DpsInstance zero_w{{{0.2, 1.0, 0.0, 0}}};
    CHECK_FALSE(stability_check(zero_w).stable);
    DpsInstance inf_mu{{{0.2, std::numeric_limits<double>::infinity(), 1.0, 0}}};
    CHECK_FALSE(stability_check(inf_mu).stable);
    CHECK_THROWS_AS(dps_sojourn(hot, 4), std::out_of_range);
}

TEST_CASE("SBS queue stability on the Fig. 5 network") {
    const auto& p = fixture::fig4(0.3);
    TrafficConfig tc;
    const double bits = 100e6;
    const auto zeta = arrival_rates(p.d, p.cfg, p.act, tc);
    const auto a = rate_matrix(p.rates, p.d, tc);
    const auto l = loads(zeta, a, bits, tc);
    auto w = TrafficConfig::uniform_weights();
    const double fig5[6] = {1, 1, 1.1, 1.1, 1.5, 1.87};
    for (int i = 1; i <= 6; ++i) at(w, i, 2) = fig5[i - 1];
    const auto inst = tier_instance(zeta, l, w, 2);
    // manual chain: rho' = zeta S / (varrho * eta * omega * delta * U)
    double manual = 0.0;
    for (int i = 1; i <= 6; ++i) {
        if (at(p.d, i, 2) == 0.0) continue;
        const double z = 0.2 * p.cfg.mbs_intensity * at(p.d, i, 2) / p.cfg.sbs.effective_intensity();
        manual += z * bits / (1.443 * 70e6 * (i % 2 ? 1.0 : 0.8) * p.rates.at((i + 1) / 2, 2));
    }
    CHECK(inst.load() == doctest::Approx(manual).epsilon(1e-12));
    CHECK(stability_check(inst).stable == (manual < 1.0));
}

TEST_CASE("MBS priority raises the throughput of class 5") {
    const auto& p = fixture::fig4(0.1);
    TrafficConfig tc;
    const auto zeta = arrival_rates(p.d, p.cfg, p.act, tc);
    const auto l = loads(zeta, rate_matrix(p.rates, p.d, tc), 100e6, tc);
    auto w = TrafficConfig::uniform_weights();
    at(w, 5, 3) = 1.5;
    const auto dps = qos_metrics(tier_instance(zeta, l, w, 3));
    const auto eps = qos_metrics(tier_instance(zeta, l, TrafficConfig::uniform_weights(), 3));
    bool found = false;
    for (std::size_t k = 0; k < dps.size(); ++k)
        if (dps[k].row == 5) {
            found = true;
            CHECK(*dps[k].t > *eps[k].t);
        }
    CHECK(found);
}

TEST_CASE("weight-scale invariance and priority direction") {
    std::mt19937_64 g(4);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    for (int trial = 0; trial < 50; ++trial) {
        DpsInstance inst;
        const int k = 2 + static_cast<int>(3 * u(g));
        for (int c = 0; c < k; ++c) inst.classes.push_back({0.2 * u(g) / k, 0.5 + u(g), 0.5 + 2.0 * u(g), 0});
        auto scaled = inst;
        const double c = 0.01 + 100.0 * u(g);
        for (auto& cl : scaled.classes) cl.weight *= c;
        for (std::size_t i = 0; i < inst.classes.size(); ++i)
            CHECK(dps_sojourn(scaled, i) == doctest::Approx(dps_sojourn(inst, i)).epsilon(1e-13));
    }
    for (double lam : {0.1, 0.3}) {
        for (double mu : {0.8, 1.5}) {
            double prev0 = std::numeric_limits<double>::infinity(), prev1 = 0.0;
            for (double w0 : {1.0, 1.5, 2.0, 4.0}) {
                DpsInstance inst{{{lam, mu, w0, 0}, {lam, mu, 1.0, 0}}};
                const double s0 = dps_sojourn(inst, 0), s1 = dps_sojourn(inst, 1);
                CHECK(s0 <= prev0);
                CHECK(s1 >= prev1);
                if (w0 > 1.0) CHECK(s0 < prev0);
                prev0 = s0;
                prev1 = s1;
            }
        }
    }
}

TEST_CASE("printed third term and its tie") {
    DpsInstance tie{{{0.2, 1.0, 2.0, 0}, {0.1, 2.0, 1.0, 0}}};
    const double s = dps_sojourn(tie, 0, SojournForm::printed);
    CHECK(std::isfinite(s));
    DpsInstance same{{{0.2, 1.0, 1.0, 0}, {0.1, 1.0, 1.0, 0}}};
    CHECK(dps_sojourn(same, 0, SojournForm::printed) == doctest::Approx(dps_sojourn(same, 0)).epsilon(1e-14));
    DpsInstance two{{{0.3, 1.0, 1.0, 0}, {0.2, 1.0, 2.0, 0}}};
    CHECK(dps_sojourn(two, 0, SojournForm::printed) != doctest::Approx(dps_sojourn(two, 0)));
}

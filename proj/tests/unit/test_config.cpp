#include <doctest.h>

#include "oracles.hpp"

#include "hetnet/config.hpp"
#include "hetnet/errors.hpp"

#include <sstream>

using namespace hetnet;

namespace {

ConfigMap parse(const std::string& text) {
    std::istringstream in(text);
    return ConfigMap::parse(in, "test");
}

const char* kMinimal = R"(
[network]
user_intensity_per_m2 = 1000 / (pi * 1000^2)
power_tier1_w = 3
power_tier2_w = 13
power_tier3_w = 193
[sbs]
parent_intensity_per_m2 = 3 / (pi * 1000^2)
mean_daughters = 10
sigma_m = 250
[mbs]
intensity_per_m2 = 2 / (pi * 1000^2)
)";

std::string field_of(const std::function<void()>& f) {
    try {
        f();
    } catch (const ConfigError& e) {
        return e.field();
    }
    return "<no error>";
}

std::string preset(int fig) { return std::string(HETNET_CONFIG_DIR) + "/fig" + std::to_string(fig) + ".cfg"; }

} // namespace

TEST_CASE("expressions") {
    CHECK(evaluate_expression("1 + 2 * 3", "k") == 7.0);
    CHECK(evaluate_expression("(1 + 2) * 3", "k") == 9.0);
    CHECK(evaluate_expression("2^3^2", "k") == 512.0);
    CHECK(evaluate_expression("-2^2", "k") == -4.0);
    CHECK(evaluate_expression("2^-1", "k") == 0.5);
    CHECK(evaluate_expression(" 1e-3 ", "k") == 1e-3);
    CHECK(evaluate_expression("1000 / (pi * 1000^2)", "k") == doctest::Approx(1000.0 / (oracle::kPi * 1e6)));
    CHECK(evaluate_expression("300 * 1000^2 / (pi * 500^2)", "k") ==
          doctest::Approx(300e6 / (oracle::kPi * 250000.0)).epsilon(1e-15));
    for (const char* bad : {"", "1 +", "(1", "1)", "2 pi", "abc", "1 / 0", "1,5"})
        CHECK(field_of([&] { evaluate_expression(bad, "sbs.sigma_m"); }) == "sbs.sigma_m");
}

TEST_CASE("parsing") {
    const auto cfg = parse("# comment\n[a.b]\n\n[network]\ncache_ratio = 0.2 ; trailing\n[]\nnetwork.pathloss = 3.5\n");
    CHECK(cfg.get("network.cache_ratio") == "0.2");
    CHECK(cfg.get("network.pathloss") == "3.5");
    CHECK_FALSE(cfg.get("network.noise_w"));

    CHECK(field_of([] { parse("[network]\ncache_ratio = 0.1\ncache_ratio = 0.2\n"); }) == "network.cache_ratio");
    CHECK(field_of([] { parse("[network]\ncache_ration = 0.1\n"); }) == "network.cache_ration");
    CHECK(field_of([] { parse("no equals sign\n"); }) == "test:1");
    CHECK(field_of([] { parse("\n[network\n"); }) == "test:2");
    CHECK(field_of([] { parse("Network.Cache = 1\n"); }) == "test:1");
    CHECK(field_of([] { ConfigMap::load("/nonexistent/x.cfg"); }) == "");

    auto c = parse(kMinimal);
    c.set("network.cache_ratio", "0.3");
    CHECK(c.get("network.cache_ratio") == "0.3");
    CHECK(field_of([&] { c.set("network.bogus", "1"); }) == "network.bogus");
    c.set("baseline.network.cache_ratio", "0.4");
    CHECK(c.baseline_overrides().at("network.cache_ratio") == "0.4");
}

TEST_CASE("resolution with units and defaults") {
    const auto s = resolve_scenario(parse(kMinimal));
    const auto ref = oracle::fig3();
    CHECK(s.network.user_intensity == doctest::Approx(ref.user_intensity).epsilon(1e-15));
    CHECK(s.network.sbs.is_thomas());
    CHECK(s.network.sbs.sigma == 250.0);
    CHECK(s.network.cache_ratio == 0.1);
    CHECK(s.network.pathloss == 4.0);
    CHECK(s.content.catalog_size == 1000);
    CHECK(s.content.content_bits == 100e6);
    CHECK(s.traffic.bandwidth_hz == 70e6);
    CHECK(s.rates.model == ClusterModel::conditioned);
    CHECK(s.sojourn_form == SojournForm::corrected);
    CHECK(s.modes == std::vector<Mode>{Mode::clustered});
    CHECK(s.resolved.at("sbs.sigma_m") == "250");
    CHECK(s.resolved.at("content.size_bits") == "1e+08");
    CHECK(s.resolved.at("mc.fading") == "true");

    // The same network in km.
    auto km = parse(R"(
[network]
user_intensity_per_km2 = 1000 / pi
power_tier1_w = 3
power_tier2_w = 13
power_tier3_w = 193
d2d_exclusion_km = 0.01
[sbs]
parent_intensity_per_km2 = 3 / pi
mean_daughters = 10
sigma_km = 0.25
[mbs]
intensity_per_km2 = 2 / pi
[content]
size_mbits = 20
[traffic]
bandwidth_mhz = 10
)");
    const auto k = resolve_scenario(km);
    CHECK(k.network.user_intensity == doctest::Approx(s.network.user_intensity).epsilon(1e-14));
    CHECK(k.network.sbs.sigma == doctest::Approx(250.0).epsilon(1e-15));
    CHECK(k.network.d2d_exclusion == doctest::Approx(10.0).epsilon(1e-15));
    CHECK(k.content.content_bits == 20e6);
    CHECK(k.traffic.bandwidth_hz == 10e6);
    CHECK(k.resolved.at("sbs.sigma_km") == "0.25");
    CHECK_FALSE(k.resolved.count("sbs.sigma_m"));

    km.set("sbs.sigma_m", "250");
    CHECK(field_of([&] { resolve_scenario(km); }) == "sbs.sigma");
}

TEST_CASE("invalid scenarios name the offending key") {
    auto with = [](const std::string& extra) { return parse(std::string(kMinimal) + extra); };
    CHECK(field_of([&] { resolve_scenario(with("[network]\n")); }) == "<no error>");
    CHECK(field_of([] { resolve_scenario(parse("[network]\npower_tier1_w = 1\n")); }) ==
          "network.user_intensity_per_m2");
    CHECK(field_of([&] { resolve_scenario(with("[content]\ncatalog_size = 10.5\n")); }) == "content.catalog_size");
    CHECK(field_of([&] { resolve_scenario(with("[content]\ncache_sbs = 5\n")); }) == "content.cache_sbs");
    CHECK(field_of([&] { resolve_scenario(with("[sbs]\nlayout = hexagonal\n")); }) == "sbs.layout");
    CHECK(field_of([&] { resolve_scenario(with("[sbs]\nintensity_per_m2 = 1e-6\n")); }) == "sbs.intensity");
    CHECK(field_of([&] { resolve_scenario(with("[mc]\nfading = maybe\n")); }) == "mc.fading");
    CHECK(field_of([&] { resolve_scenario(with("[run]\nmode = all\n")); }) == "run.mode");
    CHECK(field_of([&] { resolve_scenario(with("[qos]\ntiers = 1, 4\n")); }) == "qos.tiers");
    CHECK(field_of([&] { resolve_scenario(with("[qos]\nsojourn_form = exact\n")); }) == "qos.sojourn_form");
    CHECK(field_of([&] { resolve_scenario(with("[qos]\nweight_5_2 = 0\n")); }) == "qos.weight_5_2");
    CHECK(field_of([&] { resolve_scenario(with("[rates]\ncluster_model = printed\nrel_tol = 0.5\n")); }) ==
          "rates.rel_tol");
    CHECK(field_of([&] { resolve_scenario(with("[sweep]\nparameter = sbs.layout\nvalues = poisson\n")); }) ==
          "sweep.parameter");
    CHECK(field_of([&] { resolve_scenario(with("[sweep]\nparameter = network.cache_ratio\n")); }) == "sweep.values");
    CHECK(field_of([&] { resolve_scenario(with("[sweep]\nvalues = 1, 2\n")); }) == "sweep.parameter");
    CHECK(field_of([&] { resolve_scenario(with("[network]\npathloss = 2\n")); }) == "network.pathloss");
}

TEST_CASE("poisson layout") {
    const auto s = resolve_scenario(parse(R"(
[network]
user_intensity_per_m2 = 1e-4
power_tier1_w = 1
power_tier2_w = 1
power_tier3_w = 1
[sbs]
layout = poisson
intensity_per_m2 = 2e-5
[mbs]
intensity_per_m2 = 1e-6
)"));
    CHECK_FALSE(s.network.sbs.is_thomas());
    CHECK(s.network.sbs.intensity == 2e-5);
}

TEST_CASE("sweep values and baseline overrides") {
    auto cfg = parse(std::string(kMinimal) + R"(
[sweep]
parameter = sbs.sigma_m
values = 100, 2 * 100
[run]
mode = both
[qos]
weight_5_3 = 1.5
[baseline]
qos.weight_5_3 = 1.8
)");
    const auto base = resolve_scenario(cfg);
    CHECK(base.sweep_values == std::vector<std::string>{"100", "2 * 100"});
    CHECK(base.modes.size() == 2);
    const auto p = resolve_scenario(cfg, Mode::clustered, std::string("2 * 100"));
    CHECK(p.network.sbs.sigma == 200.0);
    CHECK(at(p.traffic.weights, 5, 3) == 1.5);
    const auto b = resolve_scenario(cfg, Mode::baseline, std::string("100"));
    CHECK_FALSE(b.network.sbs.is_thomas());
    CHECK(b.network.sbs.intensity == doctest::Approx(p.network.sbs.effective_intensity()).epsilon(1e-15));
    CHECK(at(b.traffic.weights, 5, 3) == 1.8);
    CHECK(b.resolved.at("qos.weight_5_3") == "1.8");
}

TEST_CASE("shipped presets resolve to the caption parameters") {
    for (int fig = 3; fig <= 7; ++fig) {
        const auto cfg = ConfigMap::load(preset(fig));
        const auto s = resolve_scenario(cfg);
        CHECK(s.modes.size() == 2);
        CHECK_FALSE(s.sweep_values.empty());
        for (Mode m : s.modes)
            for (const auto& v : s.sweep_values) CHECK_NOTHROW(resolve_scenario(cfg, m, v));
    }

    const auto s3 = resolve_scenario(ConfigMap::load(preset(3)));
    const auto r3 = oracle::fig3();
    CHECK(s3.command == "assoc");
    CHECK(s3.sweep_parameter == "content.skew");
    CHECK(s3.network.user_intensity == doctest::Approx(r3.user_intensity).epsilon(1e-15));
    CHECK(s3.network.sbs.parent_intensity == doctest::Approx(r3.sbs.parent_intensity).epsilon(1e-15));
    CHECK(s3.network.sbs.sigma == r3.sbs.sigma);
    CHECK(s3.network.mbs_intensity == doctest::Approx(r3.mbs_intensity).epsilon(1e-15));
    CHECK(s3.network.power == r3.power);
    // Baseline tier 2 in the caption: 30 / (pi 1000^2).
    const auto b3 = resolve_scenario(ConfigMap::load(preset(3)), Mode::baseline);
    CHECK(b3.network.sbs.intensity == doctest::Approx(30.0 / (oracle::kPi * 1e6)).epsilon(1e-14));

    // Fig. 4 is written in km; the scenario holds metres.
    const auto s4 = resolve_scenario(ConfigMap::load(preset(4)));
    const auto r4 = oracle::fig4();
    CHECK(s4.network.user_intensity * 1e6 == doctest::Approx(r4.user_intensity).epsilon(1e-14));
    CHECK(s4.network.sbs.sigma == doctest::Approx(r4.sbs.sigma * 1e3).epsilon(1e-15));
    CHECK(s4.network.power == r4.power);
    CHECK(s4.content.skew == 0.8);

    const auto s5 = resolve_scenario(ConfigMap::load(preset(5)));
    const double w5[] = {1, 1, 1.1, 1.1, 1.5, 1.87};
    for (int i = 1; i <= 6; ++i) CHECK(at(s5.traffic.weights, i, 2) == w5[i - 1]);
    CHECK(s5.traffic.request_rate == 0.2);
    CHECK(s5.content.content_bits == 100e6);
    CHECK(s5.traffic.bandwidth_hz == 70e6);
    CHECK(s5.traffic.content_rate == 1.0);
    CHECK(s5.qos_tiers == std::vector<int>{2});

    const auto c6 = resolve_scenario(ConfigMap::load(preset(6)), Mode::clustered);
    const auto b6 = resolve_scenario(ConfigMap::load(preset(6)), Mode::baseline);
    CHECK(at(c6.traffic.weights, 5, 3) == 1.5);
    CHECK(at(b6.traffic.weights, 5, 3) == 1.8);
    CHECK(at(b6.traffic.weights, 1, 3) == 1.0);
    CHECK(at(b6.traffic.weights, 3, 3) == 1.0);
    CHECK(c6.qos_tiers == std::vector<int>{3});

    CHECK(resolve_scenario(ConfigMap::load(preset(7))).qos_tiers == std::vector<int>{1});
}

TEST_CASE("key registry") {
    const auto& keys = known_keys();
    CHECK(keys.count("sbs.sigma_m"));
    CHECK(keys.count("sbs.sigma_km"));
    CHECK(keys.count("qos.weight_8_4"));
    CHECK(keys.at("network.cache_ratio") == "0.1");
    CHECK(keys.at("sbs.sigma_m").empty());
}

#include "hetnet/association.hpp"

#include "hetnet/errors.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace hetnet {

namespace {

void require_tier(int tier) {
    if (tier < 1 || tier > 3) throw std::invalid_argument("tier index must be 1, 2 or 3, got " + std::to_string(tier));
}

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

} // namespace

void NetworkConfig::validate() const {
    if (!finite_positive(user_intensity)) throw ConfigError("network.user_intensity", "must be positive");
    if (!(cache_ratio >= 0.0 && cache_ratio <= 1.0)) throw ConfigError("network.cache_ratio", "must lie in [0, 1]");
    sbs.validate("network.sbs");
    if (!finite_positive(mbs_intensity)) throw ConfigError("network.mbs_intensity", "must be positive");
    for (std::size_t i = 0; i < 3; ++i)
        if (!finite_positive(power[i]))
            throw ConfigError("network.power_tier" + std::to_string(i + 1), "must be positive");
    if (!(pathloss > 2.0)) throw DivergentPathlossError(pathloss);
    if (!(noise >= 0.0) || !std::isfinite(noise)) throw ConfigError("network.noise", "must be finite and nonnegative");
    if (!(d2d_exclusion >= 0.0) || !std::isfinite(d2d_exclusion))
        throw ConfigError("network.d2d_exclusion", "must be finite and nonnegative");
}

TierLayout NetworkConfig::layout(int tier) const {
    require_tier(tier);
    if (tier == 1) return TierLayout::poisson(cache_ratio * user_intensity);
    if (tier == 2) return sbs;
    return TierLayout::poisson(mbs_intensity);
}

NetworkConfig NetworkConfig::baseline() const {
    NetworkConfig b = *this;
    b.sbs = sbs.as_poisson();
    return b;
}

double NetworkConfig::reach(int n, int i) const { return std::pow(power_ratio(n, i), 1.0 / pathloss); }

double AssocProbs::ordered_prob(int i, int j, int k) const {
    for (std::size_t n = 0; n < ordered_tiers.size(); ++n)
        if (ordered_tiers[n] == std::array<int, 3>{i, j, k}) return ordered[n];
    throw std::invalid_argument("ordered_prob: tiers must be a permutation of 1, 2, 3");
}

QuadratureSpec Association::default_spec() {
    QuadratureSpec spec;
    spec.rel_tol = 1e-9;
    spec.abs_tol = 1e-14;
    spec.max_subdivisions = 400;
    return spec;
}

Association::Association(const NetworkConfig& cfg, QuadratureSpec spec)
    : cfg_(cfg), spec_(spec),
      laws_{ContactLaw(cfg.layout(1)), ContactLaw(cfg.layout(2)), ContactLaw(cfg.layout(3))} {
    cfg_.validate();
    spec_.validate();
}

const ContactLaw& Association::contact(int tier) const {
    require_tier(tier);
    return laws_[static_cast<std::size_t>(tier - 1)];
}

double Association::tau(int tier, double r) const { return contact(tier).hazard(r); }

double Association::support(int tier) const { return contact(tier).support(1e-16); }

double Association::serving_weight_case1(int i, double x) const {
    double w = contact(i).pdf(x);
    for (int n = 1; n <= 3; ++n)
        if (n != i && w != 0.0) w *= contact(n).ccdf(cfg_.reach(n, i) * x);
    return w;
}

double Association::serving_weight_case2(int i, double x) const {
    if (i != 2 && i != 3) throw std::invalid_argument("case 2 serves from tier 2 or 3 only");
    const int j = 5 - i;
    return contact(i).pdf(x) * contact(j).ccdf(cfg_.reach(j, i) * x);
}

double Association::tier_prob(int i) const {
    require_tier(i);
    if (cfg_.layout(i).empty()) return 0.0;
    return quad([&](double r) { return serving_weight_case1(i, r); }, 0.0, support(i), spec_);
}

double Association::pairwise_prob(int i, int j) const {
    require_tier(i);
    require_tier(j);
    if (i == j) throw std::invalid_argument("pairwise_prob needs two distinct tiers");
    if (cfg_.layout(i).empty()) return 0.0;
    const double c = cfg_.reach(j, i);
    return quad([&](double r) { return contact(i).pdf(r) * contact(j).ccdf(c * r); }, 0.0, support(i), spec_);
}

double Association::ordered_prob(int i, int j, int k) const {
    require_tier(i);
    require_tier(j);
    require_tier(k);
    if (i == j || j == k || i == k) throw std::invalid_argument("ordered_prob needs three distinct tiers");
    if (cfg_.layout(i).empty() || cfg_.layout(j).empty()) return 0.0;
    const double cji = cfg_.reach(j, i);
    const double ckj = cfg_.reach(k, j);
    const double top = support(j);
    // P(R_j > c_ji r_i, R_k > c_kj R_j | r_i), the innermost integral reduced to a CCDF
    auto inner = [&](double ri) {
        const double lo = cji * ri;
        if (lo >= top) return 0.0;
        return quad([&](double rj) { return contact(j).pdf(rj) * contact(k).ccdf(ckj * rj); }, lo, top, spec_);
    };
    return quad([&](double ri) { return contact(i).pdf(ri) * inner(ri); }, 0.0, support(i), spec_);
}

AssocProbs Association::all() const {
    AssocProbs p;
    for (int i = 1; i <= 3; ++i) p.g[static_cast<std::size_t>(i - 1)] = tier_prob(i);
    for (std::size_t n = 0; n < AssocProbs::ordered_tiers.size(); ++n) {
        const auto& t = AssocProbs::ordered_tiers[n];
        p.ordered[n] = ordered_prob(t[0], t[1], t[2]);
    }
    p.p23 = pairwise_prob(2, 3);
    p.p32 = pairwise_prob(3, 2);
    return p;
}

double Association::serving_pdf_case1(int i, double x, double norm) const {
    if (norm < 0.0) norm = tier_prob(i);
    if (norm <= 0.0) throw MeasureZeroEvent("association to tier " + std::to_string(i) + " has probability zero");
    return serving_weight_case1(i, x) / norm;
}

double Association::serving_pdf_case2(int i, double x, double norm) const {
    if (norm < 0.0) norm = pairwise_prob(i, 5 - i);
    if (norm <= 0.0) throw MeasureZeroEvent("case-2 association to tier " + std::to_string(i) + " has probability zero");
    return serving_weight_case2(i, x) / norm;
}

double Association::serving_pdf_case3(int j, double x, double y, double norm) const {
    if (j != 2 && j != 3) throw std::invalid_argument("case 3 serves from tier 2 or 3 only");
    const int k = 5 - j;
    if (norm < 0.0) norm = ordered_prob(1, j, k);
    if (norm <= 0.0) throw MeasureZeroEvent("case-3 event for tier " + std::to_string(j) + " has probability zero");
    if (x < 0.0 || x > cfg_.reach(1, j) * y) return 0.0;
    return contact(1).pdf(x) * contact(j).pdf(y) * contact(k).ccdf(cfg_.reach(k, j) * y) / norm;
}

} // namespace hetnet

#pragma once

// Max-power tier association: unconditional, ordered and pairwise
// probabilities, and the serving-distance densities they induce.
//
// Tiers are numbered 1 (cache-enabled users acting as D2D transmitters),
// 2 (small cells) and 3 (macro cells).

#include "hetnet/geometry.hpp"
#include "hetnet/quadrature.hpp"

#include <array>
#include <string>

namespace hetnet {

struct NetworkConfig {
    double user_intensity = 0.0; ///< lambda_0
    double cache_ratio = 0.1;    ///< alpha; D2D tier intensity is alpha * lambda_0
    TierLayout sbs;              ///< tier 2
    double mbs_intensity = 0.0;  ///< lambda_3
    std::array<double, 3> power{1.0, 1.0, 1.0};
    double pathloss = 4.0;       ///< beta
    double noise = 0.0;          ///< N0, same units as power
    double d2d_exclusion = 0.0;  ///< a, guard radius around a cache-enabled receiver

    void validate() const;

    /// Layout of tier 1, 2 or 3.
    TierLayout layout(int tier) const;
    /// The same network with tier 2 replaced by a PPP of equal intensity.
    NetworkConfig baseline() const;
    /// P_n / P_i
    double power_ratio(int n, int i) const { return power[static_cast<std::size_t>(n - 1)] / power[static_cast<std::size_t>(i - 1)]; }
    /// (P_n / P_i)^{1/beta}: a tier-n node beats a tier-i node at distance r only within c r.
    double reach(int n, int i) const;
};

struct AssocProbs {
    std::array<double, 3> g{};              ///< G_{3,i}
    std::array<double, 6> ordered{};        ///< P_{i,j,k} in the order of `ordered_tiers`
    double p23 = 0.0;                       ///< P(C2 > C3)
    double p32 = 0.0;                       ///< P(C3 > C2)

    static constexpr std::array<std::array<int, 3>, 6> ordered_tiers{{
        {1, 2, 3}, {1, 3, 2}, {2, 1, 3}, {2, 3, 1}, {3, 1, 2}, {3, 2, 1}}};

    double ordered_prob(int i, int j, int k) const;
};

/// Analytical association model of one network. Construction builds the
/// tier-2 contact table (shared across instances with the same layout);
/// afterwards every method is const and thread-safe.
class Association {
public:
    explicit Association(const NetworkConfig& cfg, QuadratureSpec spec = default_spec());

    static QuadratureSpec default_spec();

    const NetworkConfig& config() const noexcept { return cfg_; }
    const ContactLaw& contact(int tier) const;

    /// tau_i(r): 2 pi lambda_i r for PPP tiers, the cluster kernel for tier 2.
    double tau(int tier, double r) const;

    /// G_{3,i}
    double tier_prob(int i) const;
    /// P(C_i > C_j > C_k)
    double ordered_prob(int i, int j, int k) const;
    /// P(C_i > C_j), ignoring the third tier.
    double pairwise_prob(int i, int j) const;
    AssocProbs all() const;

    /// Case 1: density of the serving distance given association to tier i.
    /// `norm` is G_{3,i}; pass a negative value to have it computed.
    double serving_pdf_case1(int i, double x, double norm = -1.0) const;
    /// Case 2: tier i in {2,3} beats the other of {2,3}; normalised by P_{i,j}.
    double serving_pdf_case2(int i, double x, double norm = -1.0) const;
    /// Case 3: joint density of (D2D distance x, tier-j serving distance y)
    /// on 0 <= x <= (P1/Pj)^{1/beta} y, normalised by P_{1,j,k}.
    double serving_pdf_case3(int j, double x, double y, double norm = -1.0) const;

    /// Unnormalised serving densities (numerators of the above).
    double serving_weight_case1(int i, double x) const;
    double serving_weight_case2(int i, double x) const;

    /// Upper integration limit for distances of tier i (CCDF below 1e-16).
    double support(int tier) const;

private:
    NetworkConfig cfg_;
    QuadratureSpec spec_;
    std::array<ContactLaw, 3> laws_;
};

} // namespace hetnet

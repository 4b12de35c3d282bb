#pragma once

// Presets and closed-form oracles shared by the unit and acceptance tests.

#include "hetnet/association.hpp"

#include <array>
#include <cmath>
#include <numbers>
#include <vector>

namespace oracle {

constexpr double kPi = std::numbers::pi;

// Fig. 3 caption, metres.
inline hetnet::NetworkConfig fig3(double alpha = 0.1) {
    hetnet::NetworkConfig c;
    c.user_intensity = 1000.0 / (kPi * 1e6);
    c.cache_ratio = alpha;
    c.sbs = hetnet::TierLayout::thomas(3.0 / (kPi * 1e6), 10.0, 250.0);
    c.mbs_intensity = 2.0 / (kPi * 1e6);
    c.power = {3.0, 13.0, 193.0};
    return c;
}

// Fig. 4 caption, kilometres.
inline hetnet::NetworkConfig fig4(double alpha = 0.1) {
    hetnet::NetworkConfig c;
    const double area = kPi * 500.0 * 500.0;
    c.user_intensity = 300e6 / area;
    c.cache_ratio = alpha;
    c.sbs = hetnet::TierLayout::thomas(3e6 / area, 10.0, 0.05);
    c.mbs_intensity = 6e6 / area;
    c.power = {73.0, 373.0, 1773.0};
    return c;
}

// K-tier Poisson max-power association: G_i = l_i P_i^{2/b} / sum_j l_j P_j^{2/b}.
inline std::array<double, 3> ppp_association(const std::array<double, 3>& lambda, const std::array<double, 3>& power,
                                             double beta) {
    std::array<double, 3> w{};
    double total = 0.0;
    for (std::size_t i = 0; i < 3; ++i) total += w[i] = lambda[i] * std::pow(power[i], 2.0 / beta);
    for (auto& v : w) v /= total;
    return w;
}

// Ordered probability P(C_i > C_j > C_k) for Poisson tiers: with weights w,
// the strongest is i with probability w_i / W, then j among the rest.
inline double ppp_ordered(const std::array<double, 3>& g, int i, int j) {
    const double gi = g[static_cast<std::size_t>(i - 1)], gj = g[static_cast<std::size_t>(j - 1)];
    return gi * gj / (1.0 - gi);
}

// Exact mean sojourn times of an exponential DPS queue (Fayolle, Mitrani and
// Iasnogorodski 1980): for each class k,
//   T_k (1 - sum_j c_kj) - sum_j c_kj T_j = 1 / mu_k,  c_kj = l_j g_j / (mu_j g_j + mu_k g_k).
inline std::vector<double> dps_exact(const std::vector<double>& lambda, const std::vector<double>& mu,
                                     const std::vector<double>& weight) {
    const std::size_t n = lambda.size();
    std::vector<std::vector<double>> a(n, std::vector<double>(n + 1, 0.0));
    for (std::size_t k = 0; k < n; ++k) {
        a[k][k] = 1.0;
        a[k][n] = 1.0 / mu[k];
        for (std::size_t j = 0; j < n; ++j) {
            const double c = lambda[j] * weight[j] / (mu[j] * weight[j] + mu[k] * weight[k]);
            a[k][k] -= c;
            a[k][j] -= c;
        }
    }
    for (std::size_t col = 0; col < n; ++col) { // Gauss-Jordan with partial pivoting
        std::size_t piv = col;
        for (std::size_t r = col + 1; r < n; ++r)
            if (std::abs(a[r][col]) > std::abs(a[piv][col])) piv = r;
        std::swap(a[col], a[piv]);
        for (std::size_t r = 0; r < n; ++r) {
            if (r == col) continue;
            const double f = a[r][col] / a[col][col];
            for (std::size_t c = col; c <= n; ++c) a[r][c] -= f * a[col][c];
        }
    }
    std::vector<double> t(n);
    for (std::size_t k = 0; k < n; ++k) t[k] = a[k][n] / a[k][k];
    return t;
}

} // namespace oracle

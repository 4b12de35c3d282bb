#pragma once

// Brute-force oracles: spatial drops of all tiers around a typical user,
// and an event-driven simulation of the discriminatory processor-sharing
// queue.

#include "hetnet/dpsq.hpp"
#include "hetnet/rates.hpp"
#include "hetnet/traffic.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

namespace hetnet {

struct McRunSpec {
    std::size_t realizations = 10000;
    double window = 0.0;       ///< radius around the user; 0 picks one from the layouts
    double guard = -1.0;       ///< Thomas parent margin; negative picks default_guard
    std::uint64_t seed = 1;
    bool fading = true;        ///< unit-mean Rayleigh power fading on every link
    std::size_t min_hits = 500;

    void validate() const;
};

struct Proportion {
    std::size_t hits = 0;
    std::size_t trials = 0;
    double value() const { return trials ? static_cast<double>(hits) / static_cast<double>(trials) : 0.0; }
    double se() const;
};

struct McAssociation {
    std::size_t realizations = 0;
    double window = 0.0;
    std::array<Proportion, 3> g;
    std::array<Proportion, 6> ordered; ///< order of AssocProbs::ordered_tiers
    Proportion p23;
    /// Nearest distance per tier; +inf when the tier had no point in the window.
    std::array<std::vector<double>, 3> contact;
};

/// Window radius: `factor` times the largest median contact distance.
double association_window(const NetworkConfig& cfg, double factor = 5.0);

McAssociation empirical_association(const NetworkConfig& cfg, const McRunSpec& spec);

struct KsResult {
    double statistic = 0.0;
    double p_value = 1.0;
    std::size_t n = 0;
};

/// One-sample Kolmogorov-Smirnov test of finite samples against a CDF.
template <class Cdf>
KsResult ks_test(std::vector<double> samples, Cdf&& cdf);

/// Asymptotic Kolmogorov tail P(K > x).
double kolmogorov_tail(double x);

/// Pearson chi-square goodness of fit; returns the p-value.
double chi_square_p(const std::vector<double>& observed, const std::vector<double>& expected, int dof_reduction = 1);

struct MeanEstimate {
    double mean = 0.0;
    double se = 0.0;
    std::size_t hits = 0;
};

struct McRates {
    std::size_t realizations = 0;
    double window = 0.0;
    std::array<std::array<MeanEstimate, 3>, 3> u{}; ///< [case-1][tier-1], mean ln(1 + SINR)
};

/// Window for SINR sampling: the tail of the mean interference beyond it
/// stays below `bias` of the mean interference outside the median serving distance.
double rates_window(const NetworkConfig& cfg, const ActiveIntensities& act, double bias = 0.005);

/// Conditional means of ln(1 + SINR) for every (case, tier) cell, one drop
/// feeding all three cases. Tier-1 interferers are thinned to act.d2d.
McRates empirical_rates(const NetworkConfig& cfg, const ActiveIntensities& act, const McRunSpec& spec);

/// Conditional mean of one cell; throws InsufficientSamplesError below spec.min_hits.
MeanEstimate empirical_ergodic_rate(int case_id, int tier, const NetworkConfig& cfg, const ActiveIntensities& act,
                                    const McRunSpec& spec);

/// Laplace transform of normalised interference for a case-1 link of tier i
/// at distance x, by averaging exp(-s I x^beta / P_i) over interferer fields
/// drawn outside the association exclusion disks.
MeanEstimate empirical_laplace_case1(double s, double x, int i, const NetworkConfig& cfg,
                                     const ActiveIntensities& act, const McRunSpec& spec,
                                     ClusterModel conditioning = ClusterModel::conditioned);

struct McStateMatrix {
    std::size_t realizations = 0;
    Matrix84 d{};
    Matrix84 se{};
};

/// Frequencies of the typical user's (class, tier) state: cache-enabled with
/// probability alpha, content rank drawn from the popularity law.
McStateMatrix empirical_state_matrix(const NetworkConfig& cfg, const Popularity& pop, const McRunSpec& spec);

struct DesResult {
    std::vector<double> sojourn;    ///< per class
    std::vector<double> sojourn_se; ///< batch means
    std::vector<double> number;     ///< time-average number in system per class
    std::vector<double> number_se;
    std::vector<double> arrival_rate; ///< observed
    std::size_t completions = 0;
    /// Little's law N = lambda S per class, checked on batch means within 3 SE.
    bool little_ok = true;
    std::vector<double> little_gap; ///< mean of N - lambda S over batches
    std::vector<double> little_se;
    /// Mean over the last batches drifts more than 5% from the overall mean.
    bool drift_warning = false;
};

/// Jump simulation of the DPS Markov chain. The first 10% of completions are
/// discarded; standard errors come from 20 batches.
DesResult dps_des(const DpsInstance& inst, std::size_t completions, std::uint64_t seed);

// ---------------------------------------------------------------------------

template <class Cdf>
KsResult ks_test(std::vector<double> samples, Cdf&& cdf) {
    std::vector<double> finite;
    finite.reserve(samples.size());
    for (double v : samples)
        if (std::isfinite(v)) finite.push_back(v);
    std::sort(finite.begin(), finite.end());
    KsResult r;
    r.n = finite.size();
    if (r.n == 0) return r;
    const double n = static_cast<double>(r.n);
    double d = 0.0;
    for (std::size_t k = 0; k < finite.size(); ++k) {
        const double f = cdf(finite[k]);
        d = std::max({d, (static_cast<double>(k) + 1.0) / n - f, f - static_cast<double>(k) / n});
    }
    r.statistic = d;
    const double sn = std::sqrt(n);
    r.p_value = kolmogorov_tail((sn + 0.12 + 0.11 / sn) * d);
    return r;
}

} // namespace hetnet

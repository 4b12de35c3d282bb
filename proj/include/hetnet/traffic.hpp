#pragma once

// User-state matrix D, per-node arrival rates zeta, service-capable rates A
// and the loads they imply.
//
// Rows are the eight user classes (odd: backhaul-free, even: backhaul-needed;
// rows 2m-1 and 2m belong to case m). Columns are the serving tiers D2D, SBS,
// MBS and Local. Indices in the public API are 1-based.

#include "hetnet/association.hpp"
#include "hetnet/content.hpp"
#include "hetnet/rates.hpp"

#include <array>
#include <ostream>
#include <string>

namespace hetnet {

using Matrix84 = std::array<std::array<double, 4>, 8>;

inline double& at(Matrix84& m, int row, int col) {
    return m[static_cast<std::size_t>(row - 1)][static_cast<std::size_t>(col - 1)];
}
inline double at(const Matrix84& m, int row, int col) {
    return m[static_cast<std::size_t>(row - 1)][static_cast<std::size_t>(col - 1)];
}

struct TrafficConfig {
    double request_rate = 0.2;   ///< varsigma, requests/s per user of a macro cell
    double content_rate = 1.0;   ///< varrho; mean request volume is 1/varrho contents
    double bandwidth_hz = 70e6;  ///< omega
    double nats_to_bits = 1.443; ///< eta
    double backhaul_scale = 0.8; ///< delta in f(u) = delta u
    Matrix84 weights = uniform_weights();

    static Matrix84 uniform_weights();
    void validate() const;
};

/// min{alpha lambda_0, lambda_0 G_1 (1 - alpha) F(1, M1)}
double active_d2d_intensity(const NetworkConfig& cfg, const AssocProbs& probs, const Popularity& pop);
ActiveIntensities active_intensities(const NetworkConfig& cfg, const AssocProbs& probs, const Popularity& pop);

/// Eq.-25 state probabilities.
Matrix84 state_matrix(const NetworkConfig& cfg, const AssocProbs& probs, const Popularity& pop);

/// zeta_{i,j} = varsigma lambda_3 D_{i,j} / lambda'_j with lambda'_4 = alpha lambda_0.
Matrix84 arrival_rates(const Matrix84& d, const NetworkConfig& cfg, const ActiveIntensities& act,
                       const TrafficConfig& tc);

/// A_{2m-1,j} = eta omega U_{m,j}, A_{2m,j} = eta omega delta U_{m,j} where D is
/// nonzero. Local retrieval (row 7, column 4) is instantaneous: A = +inf.
Matrix84 rate_matrix(const RateTable& rates, const Matrix84& d, const TrafficConfig& tc);

struct Loads {
    Matrix84 mu{};        ///< completion rate A varrho / S, requests/s
    Matrix84 rho{};       ///< class demand zeta S / varrho, bits/s
    Matrix84 rho_prime{}; ///< zeta / mu
    std::array<double, 3> total_prime{}; ///< sum of rho' per queueing tier (D2D, SBS, MBS)
    std::array<double, 3> critical{};    ///< rho_D / sum rho / A, bits/s (NaN without traffic)
};

/// Queueing tiers only (columns 1-3). Throws UnstableQueueError when a class
/// with traffic has zero service rate.
Loads loads(const Matrix84& zeta, const Matrix84& a, double content_bits, const TrafficConfig& tc);

std::string class_label(int row); ///< e.g. "c2-bh"
std::string tier_label(int col);  ///< d2d, sbs, mbs, local

/// CSV with header "row,class,tier,<name>" and one line per entry.
void write_matrix_csv(std::ostream& out, const std::string& name, const Matrix84& m);

} // namespace hetnet

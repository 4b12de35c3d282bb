#pragma once

// Discriminatory processor sharing: the interpolated mean sojourn time of
// a multi-class queue with exponential service and the QoS metrics built
// on it. Egalitarian PS is the special case of equal weights.

#include "hetnet/traffic.hpp"

#include <optional>
#include <ostream>
#include <vector>

namespace hetnet {

struct DpsClass {
    double lambda = 0.0; ///< arrivals, requests/s
    double mu = 0.0;     ///< completion rate when served alone, requests/s
    double weight = 1.0;
    int row = 0;         ///< state-matrix row, 0 when not tied to one
};

struct DpsInstance {
    std::vector<DpsClass> classes;
    int tier = 0; ///< state-matrix column, 0 when not tied to one

    double load() const; ///< sum lambda / mu
};

/// Third term of the interpolation: w_k mu_k + w_i mu_i in the denominator
/// (exact in light traffic), or the minus sign as printed.
enum class SojournForm { corrected, printed };

struct Stability {
    bool stable = true;
    double load = 0.0;     ///< sum rho'
    double critical = 1.0; ///< bound the load must stay below
    std::string reason;
};

Stability stability_check(const DpsInstance& inst);

/// Mean sojourn of class `i` (index into inst.classes). Throws
/// UnstableQueueError outside the stability region.
double dps_sojourn(const DpsInstance& inst, std::size_t i, SojournForm form = SojournForm::corrected);

/// The same instance with every weight set to 1.
DpsInstance eps_instance(DpsInstance inst);

struct QosRow {
    int tier = 0;
    int row = 0;
    double lambda = 0.0, mu = 0.0, weight = 1.0, rho_prime = 0.0;
    bool stable = false;
    std::optional<double> n, d, t; ///< mean requests, delay (s), normalised throughput
};

/// One row per class; unstable instances give flagged rows without metrics.
std::vector<QosRow> qos_metrics(const DpsInstance& inst, SojournForm form = SojournForm::corrected);

/// Queue of tier `col` (1..3) from the traffic matrices; classes without
/// arrivals are dropped.
DpsInstance tier_instance(const Matrix84& zeta, const Loads& loads, const Matrix84& weights, int col);

void write_qos_csv(std::ostream& out, const std::vector<QosRow>& rows, bool header = true);

} // namespace hetnet

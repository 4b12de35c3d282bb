#include "hetnet/traffic.hpp"

#include "hetnet/errors.hpp"

#include <cmath>
#include <cstdio>
#include <limits>

namespace hetnet {

namespace {

bool finite_positive(double v) { return std::isfinite(v) && v > 0.0; }

constexpr double kTol = 1e-9;

} // namespace

Matrix84 TrafficConfig::uniform_weights() {
    Matrix84 w;
    for (auto& row : w) row.fill(1.0);
    return w;
}

void TrafficConfig::validate() const {
    if (!finite_positive(request_rate)) throw ConfigError("traffic.request_rate", "must be positive");
    if (!finite_positive(content_rate)) throw ConfigError("traffic.content_rate", "must be positive");
    if (!finite_positive(bandwidth_hz)) throw ConfigError("traffic.bandwidth_hz", "must be positive");
    if (!finite_positive(nats_to_bits)) throw ConfigError("traffic.nats_to_bits", "must be positive");
    if (!(backhaul_scale > 0.0 && backhaul_scale <= 1.0))
        throw ConfigError("traffic.backhaul_scale", "must lie in (0, 1]");
    for (int i = 1; i <= 8; ++i)
        for (int j = 1; j <= 4; ++j)
            if (!finite_positive(at(weights, i, j)))
                throw ConfigError("qos.weight_" + std::to_string(i) + "_" + std::to_string(j), "must be positive");
}

double active_d2d_intensity(const NetworkConfig& cfg, const AssocProbs& probs, const Popularity& pop) {
    const double alpha = cfg.cache_ratio;
    const double l0 = cfg.user_intensity;
    return std::min(alpha * l0, l0 * probs.g[0] * (1.0 - alpha) * pop.range(1, pop.config().cache_d2d));
}

ActiveIntensities active_intensities(const NetworkConfig& cfg, const AssocProbs& probs, const Popularity& pop) {
    return {active_d2d_intensity(cfg, probs, pop), cfg.sbs.effective_intensity(), cfg.mbs_intensity};
}

Matrix84 state_matrix(const NetworkConfig& cfg, const AssocProbs& probs, const Popularity& pop) {
    const auto& cc = pop.config();
    const int n = cc.catalog_size, m1 = cc.cache_d2d, m2 = cc.cache_sbs;
    const double a = cfg.cache_ratio, na = 1.0 - a;
    auto f = [&](int lo, int hi) { return pop.range(lo, hi); };
    const double p123 = probs.ordered_prob(1, 2, 3), p132 = probs.ordered_prob(1, 3, 2);

    Matrix84 d{};
    at(d, 1, 1) = probs.g[0] * na * f(1, m1);
    at(d, 1, 2) = probs.g[1] * na * f(1, m2);
    at(d, 1, 3) = probs.g[2] * na;
    at(d, 2, 2) = probs.g[1] * na * f(m2 + 1, n);
    at(d, 3, 2) = probs.p23 * a * f(m1 + 1, m2);
    at(d, 3, 3) = probs.p32 * a * f(m1 + 1, n);
    at(d, 4, 2) = probs.p23 * a * f(m2 + 1, n);
    at(d, 5, 2) = p123 * na * f(m1 + 1, m2);
    at(d, 5, 3) = p132 * na * f(m1 + 1, n);
    at(d, 6, 2) = p123 * na * f(m2 + 1, n);
    at(d, 7, 4) = a * f(1, m1);

    for (const auto& row : d)
        for (double v : row)
            if (!(v >= -kTol && v <= 1.0 + kTol)) throw InternalError("state matrix entry outside [0, 1]");
    return d;
}

Matrix84 arrival_rates(const Matrix84& d, const NetworkConfig& cfg, const ActiveIntensities& act,
                       const TrafficConfig& tc) {
    const std::array<double, 4> servers{act.d2d, act.sbs, act.mbs, cfg.cache_ratio * cfg.user_intensity};
    Matrix84 z{};
    for (int i = 1; i <= 8; ++i)
        for (int j = 1; j <= 4; ++j) {
            const double dij = at(d, i, j);
            if (dij == 0.0) continue;
            const double lj = servers[static_cast<std::size_t>(j - 1)];
            if (!(lj > 0.0))
                throw ConfigError("traffic", "offered load for " + class_label(i) + " at tier " + tier_label(j) +
                                                 " but no active servers");
            at(z, i, j) = tc.request_rate * cfg.mbs_intensity * dij / lj;
        }
    return z;
}

Matrix84 rate_matrix(const RateTable& rates, const Matrix84& d, const TrafficConfig& tc) {
    const double scale = tc.nats_to_bits * tc.bandwidth_hz;
    Matrix84 a{};
    for (int m = 1; m <= 3; ++m)
        for (int j = 1; j <= 3; ++j)
            for (int bh = 0; bh < 2; ++bh) {
                const int row = 2 * m - 1 + bh;
                if (at(d, row, j) == 0.0) continue;
                if (!rates.has(m, j))
                    throw InternalError("no rate for case " + std::to_string(m) + ", tier " + std::to_string(j) +
                                        " although the state has positive probability");
                const double u = rates.at(m, j);
                at(a, row, j) = scale * (bh ? tc.backhaul_scale * u : u);
            }
    if (at(d, 7, 4) != 0.0) at(a, 7, 4) = std::numeric_limits<double>::infinity();
    return a;
}

Loads loads(const Matrix84& zeta, const Matrix84& a, double content_bits, const TrafficConfig& tc) {
    if (!finite_positive(content_bits)) throw ConfigError("content.size_bits", "must be positive");
    Loads l;
    for (int j = 1; j <= 3; ++j) {
        double rho_sum = 0.0, inv_sum = 0.0, prime = 0.0;
        for (int i = 1; i <= 8; ++i) {
            const double z = at(zeta, i, j);
            const double aij = at(a, i, j);
            if (z == 0.0) continue;
            if (!(aij > 0.0))
                throw UnstableQueueError(std::numeric_limits<double>::infinity(), 0.0,
                                         class_label(i) + " at tier " + tier_label(j) + " has traffic but no capacity");
            const double mu = aij * tc.content_rate / content_bits;
            at(l.mu, i, j) = mu;
            at(l.rho, i, j) = z * content_bits / tc.content_rate;
            at(l.rho_prime, i, j) = z / mu;
            rho_sum += at(l.rho, i, j);
            inv_sum += at(l.rho, i, j) / aij;
            prime += z / mu;
        }
        const auto k = static_cast<std::size_t>(j - 1);
        l.total_prime[k] = prime;
        l.critical[k] = inv_sum > 0.0 ? rho_sum / inv_sum : std::numeric_limits<double>::quiet_NaN();
    }
    return l;
}

std::string class_label(int row) {
    if (row < 1 || row > 8) throw std::out_of_range("class row must be in 1..8");
    return "c" + std::to_string((row + 1) / 2) + (row % 2 ? "-free" : "-bh");
}

std::string tier_label(int col) {
    static const char* names[] = {"d2d", "sbs", "mbs", "local"};
    if (col < 1 || col > 4) throw std::out_of_range("tier column must be in 1..4");
    return names[col - 1];
}

void write_matrix_csv(std::ostream& out, const std::string& name, const Matrix84& m) {
    out << "row,class,tier," << name << "\n";
    char buf[64];
    for (int i = 1; i <= 8; ++i)
        for (int j = 1; j <= 4; ++j) {
            std::snprintf(buf, sizeof buf, "%.10g", at(m, i, j));
            out << i << ',' << class_label(i) << ',' << tier_label(j) << ',' << buf << '\n';
        }
}

} // namespace hetnet

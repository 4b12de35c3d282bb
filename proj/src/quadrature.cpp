#include "hetnet/quadrature.hpp"

#include <map>
#include <mutex>
#include <numbers>

namespace hetnet {

void QuadratureSpec::validate() const {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: rel_tol must be positive");
    if (!(abs_tol > 0.0)) throw std::invalid_argument("QuadratureSpec: abs_tol must be positive");
    if (max_subdivisions < 1) throw std::invalid_argument("QuadratureSpec: max_subdivisions must be >= 1");
    if (!(tail_scale > 0.0)) throw std::invalid_argument("QuadratureSpec: tail_scale must be positive");
}

GaussLegendre::GaussLegendre(int n) : nodes_(static_cast<std::size_t>(n)), weights_(static_cast<std::size_t>(n)) {
    if (n < 1) throw std::invalid_argument("GaussLegendre: order must be >= 1");
    // Newton iteration on P_n from the Chebyshev-like initial guess.
    for (int i = 0; i < (n + 1) / 2; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            double p0 = 1.0, p1 = x;
            for (int k = 2; k <= n; ++k) {
                const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
                p0 = p1;
                p1 = p2;
            }
            if (n == 1) p0 = 1.0;
            dp = n * (x * p1 - p0) / (x * x - 1.0);
            const double dx = p1 / dp;
            x -= dx;
            if (std::abs(dx) < 1e-16) break;
        }
        // Recompute the derivative at the converged root.
        double p0 = 1.0, p1 = x;
        for (int k = 2; k <= n; ++k) {
            const double p2 = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
            p0 = p1;
            p1 = p2;
        }
        dp = n == 1 ? 1.0 : n * (x * p1 - p0) / (x * x - 1.0);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        nodes_[static_cast<std::size_t>(i)] = -x;
        nodes_[static_cast<std::size_t>(n - 1 - i)] = x;
        weights_[static_cast<std::size_t>(i)] = w;
        weights_[static_cast<std::size_t>(n - 1 - i)] = w;
    }
    if (n == 1) {
        nodes_[0] = 0.0;
        weights_[0] = 2.0;
    }
}

const GaussLegendre& GaussLegendre::get(int n) {
    static std::mutex mutex;
    static std::map<int, GaussLegendre> rules;
    std::lock_guard lock(mutex);
    auto it = rules.find(n);
    if (it == rules.end()) it = rules.emplace(n, GaussLegendre(n)).first;
    return it->second;
}

} // namespace hetnet

#include "hetnet/content.hpp"

#include "hetnet/errors.hpp"

#include <cmath>
#include <string>

namespace hetnet {

void ContentConfig::validate() const {
    if (catalog_size < 1) throw ConfigError("content.catalog_size", "must be at least 1");
    if (cache_d2d < 1) throw ConfigError("content.cache_d2d", "must be at least 1");
    if (cache_sbs < cache_d2d) throw ConfigError("content.cache_sbs", "must be at least cache_d2d");
    if (catalog_size < cache_sbs) throw ConfigError("content.catalog_size", "must be at least cache_sbs");
    if (!(skew >= 0.0) || !std::isfinite(skew)) throw ConfigError("content.skew", "must be finite and nonnegative");
    if (!(content_bits > 0.0) || !std::isfinite(content_bits)) throw ConfigError("content.size_bits", "must be positive");
}

Popularity::Popularity(const ContentConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    const auto n = static_cast<std::size_t>(cfg_.catalog_size);
    cumulative_.resize(n + 1);
    cumulative_[0] = 0.0;
    // Compensated running sum: the tail ranges F(M2+1, N) are differences of
    // two numbers close to the total.
    double sum = 0.0, carry = 0.0;
    for (std::size_t i = 1; i <= n; ++i) {
        const double w = std::pow(static_cast<double>(i), -cfg_.skew);
        const double y = w - carry;
        const double t = sum + y;
        carry = (t - sum) - y;
        sum = t;
        cumulative_[i] = sum;
    }
    total_ = sum;
}

double Popularity::pmf(int rank) const {
    if (rank < 1 || rank > cfg_.catalog_size)
        throw std::domain_error("zipf rank " + std::to_string(rank) + " outside [1, " +
                                std::to_string(cfg_.catalog_size) + "]");
    return std::pow(static_cast<double>(rank), -cfg_.skew) / total_;
}

double Popularity::range(int a, int b) const {
    if (a < 1 || b > cfg_.catalog_size)
        throw std::domain_error("popularity range [" + std::to_string(a) + ", " + std::to_string(b) +
                                "] outside the catalogue");
    if (a > b + 1) throw std::domain_error("popularity range has a > b");
    if (a == b + 1) return 0.0;
    return (cumulative_[static_cast<std::size_t>(b)] - cumulative_[static_cast<std::size_t>(a - 1)]) / total_;
}

} // namespace hetnet

#pragma once

#include <cstddef>
#include <vector>

namespace hetnet {

/// Catalogue and cache sizes with the Zipf skew of request popularity.
struct ContentConfig {
    int catalog_size = 1000; ///< N
    int cache_d2d = 10;      ///< M1, items held by every cache-enabled user
    int cache_sbs = 100;     ///< M2, items held by every small cell
    double skew = 0.8;       ///< gamma
    double content_bits = 100e6;

    void validate() const;
};

/// Zipf popularity with precomputed cumulative sums, so that partial sums
/// are exact differences of one table.
class Popularity {
public:
    explicit Popularity(const ContentConfig& cfg);

    const ContentConfig& config() const noexcept { return cfg_; }

    /// f_i for rank i in [1, N].
    double pmf(int rank) const;

    /// F_pop(a, b) = sum_{i=a}^{b} f_i; an empty range (a = b + 1) gives 0.
    double range(int a, int b) const;

private:
    ContentConfig cfg_;
    std::vector<double> cumulative_; // cumulative_[k] = sum of the k most popular weights
    double total_ = 0.0;
};

} // namespace hetnet

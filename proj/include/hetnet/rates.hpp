#pragma once

// Interference Laplace functionals and average ergodic rates (nats per
// channel use) for the three association cases.

#include "hetnet/association.hpp"

#include <array>
#include <functional>
#include <optional>
#include <string>
#include <vector>

namespace hetnet {

/// How the clustered small-cell interference factor is evaluated.
enum class ClusterModel {
    /// The one-dimensional Gaussian-kernel expression exactly as printed.
    /// Not dimensionless: its value changes with the length unit.
    printed,
    /// The planar PGFL over the plane minus the exclusion disk, reduced
    /// exactly to a Rician kernel. Ignores that the empty disk changes the
    /// law of the cluster centres.
    planar,
    /// Planar PGFL conditioned on the empty disk (parents thinned by their
    /// void probability) plus the serving node's own cluster when tier 2 serves.
    conditioned,
};

std::string to_string(ClusterModel m);
ClusterModel cluster_model_from_string(const std::string& s);

/// Intensities of transmitting nodes per tier.
struct ActiveIntensities {
    double d2d = 0.0;
    double sbs = 0.0;
    double mbs = 0.0;

    double operator[](int tier) const;
};

/// ln E prod 1/(1 + (r/ell)^{-beta}) over a PPP of intensity `lambda` outside
/// the disk of radius `exclusion`: -2 pi lambda int_e^inf y / (1 + (y/ell)^beta) dy.
double ppp_log_laplace(double lambda, double exclusion, double ell, double beta);

/// Tier-2 Thomas interference. Distances are in the layout's length unit.
class ClusterInterference {
public:
    ClusterInterference(const TierLayout& sbs, double beta, ClusterModel model);

    /// Quantities that depend only on the exclusion radius, reused across s.
    class Slice {
    public:
        /// ln of the field factor for per-node kernel 1/(1 + (r/ell)^beta).
        double log_field(double ell) const;
        /// Factor of the serving node's cluster siblings (1 if not applicable).
        double sibling(double ell) const;

    private:
        friend class ClusterInterference;
        const ClusterInterference* owner_ = nullptr;
        double rho_ = 0.0;
        double t_far_ = 0.0; // start of the far region
        // near region: parent radii (in sigma units) with quadrature weights
        std::vector<double> near_t_, near_w_, near_void_, near_sib_;
        std::vector<std::size_t> near_off_;
        std::vector<double> near_b_, near_q_;
        // far region up to far_end_, then a power-law tail
        std::vector<double> far_t_, far_w_;
        std::vector<std::size_t> far_off_;
        std::vector<double> far_b_, far_q_;
        double sib_norm_ = 0.0;
        double far_end_ = 0.0;

        double j_value(const std::vector<std::size_t>& off, const std::vector<double>& b,
                       const std::vector<double>& q, std::size_t k, double inv_l) const;
        double far_adaptive(double inv_l) const;
    };

    Slice slice(double exclusion) const;

    /// Direct nested adaptive quadrature of the same quantities (slow; for checks).
    double log_field_reference(double exclusion, double ell) const;
    double sibling_reference(double exclusion, double ell) const;

    ClusterModel model() const noexcept { return model_; }
    const TierLayout& layout() const noexcept { return sbs_; }

private:
    double v(double b, double inv_l) const; // 1 / (1 + (b/L)^beta)
    double printed_log_field(double exclusion, double ell) const;

    TierLayout sbs_;
    double beta_;
    ClusterModel model_;
    double scale_; // 2 pi lambda_p sigma^2
};

struct RateOptions {
    ClusterModel model = ClusterModel::conditioned;
    /// Tolerances of the serving-distance and s integrals.
    double rel_tol = 1e-5;
    double abs_tol = 1e-9;
};

/// Average ergodic rates U_{m,i}; absent entries are (case, tier) pairs that
/// are invalid or whose association event has probability zero.
struct RateTable {
    std::array<std::array<std::optional<double>, 3>, 3> u{}; // [case-1][tier-1]

    bool has(int case_id, int tier) const;
    double at(int case_id, int tier) const;
    void set(int case_id, int tier, double value);
};

class RateModel {
public:
    RateModel(const Association& assoc, ActiveIntensities active, RateOptions opt = {});

    /// M_y(s, x): Laplace transform of normalised interference plus noise.
    double laplace_case1(double s, double x, int i) const;
    double laplace_case2(double s, double x, int i) const;
    double laplace_case3(double s, double x, double y, int j) const;

    double rate_case1(int i) const;
    double rate_case2(int i) const;
    double rate_case3(int j) const;

    /// All valid entries; zero-probability events are left absent.
    RateTable table() const;

    const Association& association() const noexcept { return assoc_; }
    const ActiveIntensities& active() const noexcept { return active_; }

private:
    // ln of the noise, tier-2 and tier-3 factors (and tier 1 with exclusion
    // c_1i x when asked) for a link of tier i at distance x.
    double log_laplace_common(const ClusterInterference::Slice* slice, double s, double x, int i,
                              bool include_tier1) const;
    double s_integral(const std::function<double(double)>& laplace) const;
    void require_interference(int serving) const;

    const Association& assoc_;
    ActiveIntensities active_;
    RateOptions opt_;
    std::optional<ClusterInterference> cluster_;
};

} // namespace hetnet

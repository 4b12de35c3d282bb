#pragma once

// Contact-distance laws of Poisson and Thomas-cluster tiers, and a sampler
// for both.

#include "hetnet/rng.hpp"

#include <memory>
#include <ostream>
#include <string>
#include <vector>

namespace hetnet {

struct TierLayout {
    enum class Kind { poisson, thomas };

    Kind kind = Kind::poisson;
    double intensity = 0.0;        ///< points per unit area (poisson)
    double parent_intensity = 0.0; ///< lambda_p2 (thomas)
    double mean_daughters = 0.0;   ///< m-bar (thomas)
    double sigma = 0.0;            ///< per-axis displacement std (thomas)

    static TierLayout poisson(double lambda);
    static TierLayout thomas(double parent_lambda, double mean_daughters, double sigma);

    bool is_thomas() const noexcept { return kind == Kind::thomas; }
    /// lambda for poisson, m-bar * lambda_p2 for thomas.
    double effective_intensity() const noexcept;
    /// Same effective intensity, Poisson placement.
    TierLayout as_poisson() const { return poisson(effective_intensity()); }
    /// An empty tier (zero intensity) is allowed; it never serves nor interferes.
    bool empty() const noexcept { return effective_intensity() == 0.0; }

    /// Throws ConfigError naming `field` on invalid parameters.
    void validate(const std::string& field) const;
};

double ppp_contact_pdf(double r, double lambda);
double ppp_contact_ccdf(double r, double lambda);

/// Dimensionless Thomas-cluster contact quantities in rho = r / sigma:
///   h(rho)  = int_0^inf t (1 - exp(-m P1(t, rho))) dt
///   h'(rho) = m int_0^inf t q(t, rho) exp(-m P1(t, rho)) dt
/// with P1 = 1 - Q1, so that the CCDF is exp(-2 pi lambda_p sigma^2 h(r/sigma)).
/// Computed by adaptive quadrature at every call.
double tcp_h(double rho, double mean_daughters);
double tcp_h_prime(double rho, double mean_daughters);

/// Contact distance of a Thomas tier. Construction tabulates h on a uniform
/// rho grid (with exact derivatives) and interpolates with cubic Hermite
/// splines; the PDF is the derivative of the interpolated CCDF.
class TcpContact {
public:
    explicit TcpContact(const TierLayout& layout);

    const TierLayout& layout() const noexcept { return layout_; }

    /// -ln CCDF
    double exponent(double r) const;
    double ccdf(double r) const;
    double pdf(double r) const;
    /// d exponent / dr; tau_2 of the association formulas.
    double hazard(double r) const;

    /// Direct quadrature, bypassing the table.
    double ccdf_exact(double r) const;
    double pdf_exact(double r) const;

    /// Displayed kernel m int 2 pi lambda_p (z/sigma) q(z/sigma, r/sigma)
    /// exp(-m (1 - Q1(z/sigma, c r/sigma))) dz with power-ratio factor c.
    double tau_scaled(double r, double c) const;

    /// Distance beyond which the CCDF is below exp(-60).
    double table_limit() const noexcept { return rho_max_ * layout_.sigma; }

private:
    void interpolate(double rho, double& h, double& dh) const;

    TierLayout layout_;
    double scale_ = 0.0; // 2 pi lambda_p sigma^2
    double rho_max_ = 0.0;
    double step_ = 0.0;
    std::vector<double> h_;
    std::vector<double> dh_;
};

/// Shared, immutable contact table for a layout (built once per parameter set).
std::shared_ptr<const TcpContact> tcp_contact_table(const TierLayout& layout);

/// Contact-distance law of any tier.
class ContactLaw {
public:
    explicit ContactLaw(const TierLayout& layout);

    const TierLayout& layout() const noexcept { return layout_; }
    double ccdf(double r) const;
    double pdf(double r) const;
    /// pdf / ccdf, the tau_i kernel of the association formulas.
    double hazard(double r) const;
    /// Smallest tabulated distance with CCDF below `eps` (a safe integration bound).
    double support(double eps = 1e-16) const;
    /// Median contact distance.
    double median() const;

private:
    TierLayout layout_;
    std::shared_ptr<const TcpContact> tcp_;
};

struct Point {
    double x = 0.0;
    double y = 0.0;
    double norm() const;
};

/// Points of `layout` inside the disk of radius `window` around the origin.
/// Thomas parents are drawn in the disk enlarged by `guard` so that clusters
/// straddling the window edge are complete.
std::vector<Point> sample_tier(const TierLayout& layout, double window, double guard, SplitMix64& rng);

/// Default guard for a layout and window: max(6 sigma, window / 2) for thomas, 0 for poisson.
double default_guard(const TierLayout& layout, double window);

/// Writes "x,y,tier" rows.
void write_points_csv(std::ostream& out, const std::vector<std::vector<Point>>& tiers);

} // namespace hetnet

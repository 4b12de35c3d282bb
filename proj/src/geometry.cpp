#include "hetnet/geometry.hpp"

#include "hetnet/errors.hpp"
#include "hetnet/quadrature.hpp"
#include "hetnet/specfun.hpp"

#include <cmath>
#include <map>
#include <mutex>
#include <numbers>
#include <random>
#include <tuple>

namespace hetnet {

using specfun::marcum_q1_complement;
using specfun::rician_pdf;

namespace {

constexpr double kTwoPi = 2.0 * std::numbers::pi;
constexpr int kTableIntervals = 2048;
constexpr double kTableExponent = 60.0;

double parent_span(double rho, double m) { return rho + 12.0 * std::max(1.0, std::sqrt(m)); }

QuadratureSpec tight_spec() {
    QuadratureSpec spec;
    spec.rel_tol = 1e-11;
    spec.abs_tol = 1e-300;
    spec.max_subdivisions = 400;
    return spec;
}

// m int t q(t, rho) exp(-m P1(t, c rho)) dt
double tcp_kernel(double rho, double c, double m) {
    if (rho == 0.0) return 0.0;
    auto f = [=](double t) { return t * rician_pdf(t, rho) * std::exp(-m * marcum_q1_complement(t, c * rho)); };
    return m * quad(f, 0.0, parent_span(std::max(rho, c * rho), m), tight_spec());
}

} // namespace

TierLayout TierLayout::poisson(double lambda) {
    TierLayout t;
    t.kind = Kind::poisson;
    t.intensity = lambda;
    return t;
}

TierLayout TierLayout::thomas(double parent_lambda, double mean_daughters, double sigma) {
    TierLayout t;
    t.kind = Kind::thomas;
    t.parent_intensity = parent_lambda;
    t.mean_daughters = mean_daughters;
    t.sigma = sigma;
    return t;
}

double TierLayout::effective_intensity() const noexcept {
    return kind == Kind::poisson ? intensity : parent_intensity * mean_daughters;
}

void TierLayout::validate(const std::string& field) const {
    auto finite_nonneg = [](double v) { return std::isfinite(v) && v >= 0.0; };
    if (kind == Kind::poisson) {
        if (!finite_nonneg(intensity)) throw ConfigError(field + ".intensity", "must be finite and nonnegative");
        return;
    }
    if (!(parent_intensity > 0.0) || !std::isfinite(parent_intensity))
        throw ConfigError(field + ".parent_intensity", "must be positive");
    if (!(mean_daughters > 0.0) || !std::isfinite(mean_daughters))
        throw ConfigError(field + ".mean_daughters", "must be positive");
    if (!(sigma > 0.0) || !std::isfinite(sigma)) throw ConfigError(field + ".sigma", "must be positive");
}

double ppp_contact_pdf(double r, double lambda) {
    return kTwoPi * lambda * r * std::exp(-std::numbers::pi * lambda * r * r);
}

double ppp_contact_ccdf(double r, double lambda) { return std::exp(-std::numbers::pi * lambda * r * r); }

double tcp_h(double rho, double m) {
    if (rho == 0.0) return 0.0;
    auto f = [=](double t) { return -t * std::expm1(-m * marcum_q1_complement(t, rho)); };
    return quad(f, 0.0, parent_span(rho, m), tight_spec());
}

double tcp_h_prime(double rho, double m) { return tcp_kernel(rho, 1.0, m); }

TcpContact::TcpContact(const TierLayout& layout) : layout_(layout) {
    if (!layout.is_thomas()) throw std::invalid_argument("TcpContact requires a thomas layout");
    layout.validate("tier2");
    const double m = layout.mean_daughters;
    scale_ = kTwoPi * layout.parent_intensity * layout.sigma * layout.sigma;
    // h <= m rho^2 / 2, so this starting point undershoots; grow until the CCDF is negligible.
    rho_max_ = std::sqrt(2.0 * kTableExponent / (scale_ * m));
    while (scale_ * tcp_h(rho_max_, m) < kTableExponent) rho_max_ *= 1.25;
    step_ = rho_max_ / kTableIntervals;
    h_.resize(kTableIntervals + 1);
    dh_.resize(kTableIntervals + 1);
    for (int k = 0; k <= kTableIntervals; ++k) {
        const double rho = k * step_;
        h_[static_cast<std::size_t>(k)] = tcp_h(rho, m);
        dh_[static_cast<std::size_t>(k)] = tcp_h_prime(rho, m);
    }
}

void TcpContact::interpolate(double rho, double& h, double& dh) const {
    const double pos = rho / step_;
    int k = static_cast<int>(pos);
    if (k >= kTableIntervals) k = kTableIntervals - 1;
    const double u = pos - k;
    const auto i = static_cast<std::size_t>(k);
    const double h0 = h_[i], h1 = h_[i + 1];
    const double d0 = dh_[i] * step_, d1 = dh_[i + 1] * step_;
    const double u2 = u * u, u3 = u2 * u;
    h = (2 * u3 - 3 * u2 + 1) * h0 + (u3 - 2 * u2 + u) * d0 + (-2 * u3 + 3 * u2) * h1 + (u3 - u2) * d1;
    const double dpos = (6 * u2 - 6 * u) * h0 + (3 * u2 - 4 * u + 1) * d0 + (-6 * u2 + 6 * u) * h1 + (3 * u2 - 2 * u) * d1;
    dh = dpos / step_;
}

double TcpContact::exponent(double r) const {
    const double rho = r / layout_.sigma;
    if (rho > rho_max_) return scale_ * tcp_h(rho, layout_.mean_daughters);
    double h, dh;
    interpolate(rho, h, dh);
    return scale_ * h;
}

double TcpContact::hazard(double r) const {
    const double rho = r / layout_.sigma;
    if (rho > rho_max_) return scale_ * tcp_h_prime(rho, layout_.mean_daughters) / layout_.sigma;
    double h, dh;
    interpolate(rho, h, dh);
    return scale_ * dh / layout_.sigma;
}

double TcpContact::ccdf(double r) const { return std::exp(-exponent(r)); }

double TcpContact::pdf(double r) const {
    const double rho = r / layout_.sigma;
    if (rho > rho_max_) return pdf_exact(r);
    double h, dh;
    interpolate(rho, h, dh);
    return scale_ * dh / layout_.sigma * std::exp(-scale_ * h);
}

double TcpContact::ccdf_exact(double r) const {
    return std::exp(-scale_ * tcp_h(r / layout_.sigma, layout_.mean_daughters));
}

double TcpContact::pdf_exact(double r) const {
    const double rho = r / layout_.sigma;
    const double m = layout_.mean_daughters;
    return scale_ * tcp_h_prime(rho, m) / layout_.sigma * std::exp(-scale_ * tcp_h(rho, m));
}

double TcpContact::tau_scaled(double r, double c) const {
    return scale_ / layout_.sigma * tcp_kernel(r / layout_.sigma, c, layout_.mean_daughters);
}

std::shared_ptr<const TcpContact> tcp_contact_table(const TierLayout& layout) {
    using Key = std::tuple<double, double, double>;
    static std::mutex mutex;
    static std::map<Key, std::shared_ptr<const TcpContact>> tables;
    const Key key{layout.parent_intensity, layout.mean_daughters, layout.sigma};
    {
        std::lock_guard lock(mutex);
        if (auto it = tables.find(key); it != tables.end()) return it->second;
    }
    auto table = std::make_shared<const TcpContact>(layout);
    std::lock_guard lock(mutex);
    return tables.emplace(key, std::move(table)).first->second;
}

ContactLaw::ContactLaw(const TierLayout& layout) : layout_(layout) {
    if (layout.is_thomas()) tcp_ = tcp_contact_table(layout);
}

double ContactLaw::ccdf(double r) const {
    if (tcp_) return tcp_->ccdf(r);
    return ppp_contact_ccdf(r, layout_.intensity);
}

double ContactLaw::pdf(double r) const {
    if (tcp_) return tcp_->pdf(r);
    return ppp_contact_pdf(r, layout_.intensity);
}

double ContactLaw::hazard(double r) const {
    if (tcp_) return tcp_->hazard(r);
    return kTwoPi * layout_.intensity * r;
}

namespace {

// Smallest r with exponent(r) >= target, by bisection on the monotone table.
template <class Exponent>
double invert_exponent(Exponent&& exponent, double target, double hi) {
    double lo = 0.0;
    while (exponent(hi) < target) hi *= 2.0;
    for (int it = 0; it < 200 && hi - lo > 1e-12 * hi; ++it) {
        const double mid = 0.5 * (lo + hi);
        (exponent(mid) < target ? lo : hi) = mid;
    }
    return hi;
}

} // namespace

double ContactLaw::support(double eps) const {
    const double target = -std::log(eps);
    if (tcp_) return invert_exponent([this](double r) { return tcp_->exponent(r); }, target, tcp_->table_limit());
    if (layout_.intensity == 0.0) return 0.0;
    return std::sqrt(target / (std::numbers::pi * layout_.intensity));
}

double ContactLaw::median() const {
    if (tcp_) return invert_exponent([this](double r) { return tcp_->exponent(r); }, std::log(2.0), tcp_->table_limit());
    if (layout_.intensity == 0.0) return std::numeric_limits<double>::infinity();
    return std::sqrt(std::log(2.0) / (std::numbers::pi * layout_.intensity));
}

double Point::norm() const { return std::hypot(x, y); }

double default_guard(const TierLayout& layout, double window) {
    return layout.is_thomas() ? std::max(6.0 * layout.sigma, 0.5 * window) : 0.0;
}

std::vector<Point> sample_tier(const TierLayout& layout, double window, double guard, SplitMix64& rng) {
    if (!(window > 0.0)) throw std::invalid_argument("sample_tier: window must be positive");
    std::vector<Point> points;
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    auto uniform_in_disk = [&](double radius) {
        const double r = radius * std::sqrt(unit(rng));
        const double a = kTwoPi * unit(rng);
        return Point{r * std::cos(a), r * std::sin(a)};
    };
    if (!layout.is_thomas()) {
        if (layout.intensity == 0.0) return points;
        std::poisson_distribution<long> count(layout.intensity * std::numbers::pi * window * window);
        const long n = count(rng);
        points.reserve(static_cast<std::size_t>(n));
        for (long i = 0; i < n; ++i) points.push_back(uniform_in_disk(window));
        return points;
    }
    const double outer = window + guard;
    std::poisson_distribution<long> parents(layout.parent_intensity * std::numbers::pi * outer * outer);
    std::poisson_distribution<int> daughters(layout.mean_daughters);
    std::normal_distribution<double> shift(0.0, layout.sigma);
    const long np = parents(rng);
    const double w2 = window * window;
    for (long p = 0; p < np; ++p) {
        const Point c = uniform_in_disk(outer);
        const int nd = daughters(rng);
        for (int d = 0; d < nd; ++d) {
            const Point q{c.x + shift(rng), c.y + shift(rng)};
            if (q.x * q.x + q.y * q.y <= w2) points.push_back(q);
        }
    }
    return points;
}

void write_points_csv(std::ostream& out, const std::vector<std::vector<Point>>& tiers) {
    out << "x,y,tier\n";
    char buf[96];
    for (std::size_t t = 0; t < tiers.size(); ++t)
        for (const auto& p : tiers[t]) {
            std::snprintf(buf, sizeof buf, "%.10g,%.10g,%zu\n", p.x, p.y, t + 1);
            out << buf;
        }
}

} // namespace hetnet

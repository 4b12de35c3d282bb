#include "hetnet/rates.hpp"

#include "hetnet/errors.hpp"
#include "hetnet/specfun.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace hetnet {

using specfun::marcum_q1_complement;
using specfun::rician_pdf;

namespace {

constexpr double kPi = std::numbers::pi;
constexpr double kReach = 9.0;     // Rician kernel mass beyond +-9 is below 1e-17
constexpr double kFarLength = 30.0; // fixed far-region panels, in sigma units
constexpr double kTinyRho = 1e-9;

// Composite Gauss-Legendre nodes on [a, b] with panels of at most `width`.
template <class Emit>
void panels(double a, double b, double width, int order, Emit&& emit) {
    if (!(b > a)) return;
    const auto& gl = GaussLegendre::get(order);
    const int n = std::max(1, static_cast<int>(std::ceil((b - a) / width)));
    const double w = (b - a) / n;
    for (int p = 0; p < n; ++p) {
        const double c = a + (p + 0.5) * w;
        for (int k = 0; k < gl.size(); ++k) emit(c + 0.5 * w * gl.nodes()[k], 0.5 * w * gl.weights()[k]);
    }
}

// Nodes for int_{lo}^{hi} g(b) db where g may vary on the scale of b itself
// near zero: geometric panels up to 2, unit panels beyond.
template <class Emit>
void radial_nodes(double lo, double hi, Emit&& emit) {
    lo = std::max(lo, 1e-6);
    if (!(hi > lo)) return;
    double a = lo;
    const auto& gl = GaussLegendre::get(6);
    while (a < std::min(2.0, hi)) {
        const double b = std::min({2.0 * a, 2.0, hi});
        const double c = 0.5 * (a + b), h = 0.5 * (b - a);
        for (int k = 0; k < gl.size(); ++k) emit(c + h * gl.nodes()[k], h * gl.weights()[k]);
        a = b;
    }
    panels(std::max(a, lo), hi, 1.0, 6, emit);
}

// Nodes for the Rician kernel of a parent at t far from the origin.
template <class Emit>
void kernel_nodes(double t, double lo, Emit&& emit) {
    panels(std::max(lo, t - kReach), t + kReach, 6.0, 10, emit);
}

QuadratureSpec reference_spec() {
    QuadratureSpec spec;
    spec.rel_tol = 1e-9;
    spec.abs_tol = 1e-15;
    spec.max_subdivisions = 400;
    return spec;
}

} // namespace

std::string to_string(ClusterModel m) {
    switch (m) {
    case ClusterModel::printed: return "printed";
    case ClusterModel::planar: return "planar";
    case ClusterModel::conditioned: return "conditioned";
    }
    return "?";
}

ClusterModel cluster_model_from_string(const std::string& s) {
    if (s == "printed") return ClusterModel::printed;
    if (s == "planar") return ClusterModel::planar;
    if (s == "conditioned") return ClusterModel::conditioned;
    throw ConfigError("rates.cluster_model", "expected printed, planar or conditioned, got '" + s + "'");
}

double ActiveIntensities::operator[](int tier) const {
    switch (tier) {
    case 1: return d2d;
    case 2: return sbs;
    case 3: return mbs;
    }
    throw std::invalid_argument("tier index must be 1, 2 or 3");
}

double ppp_log_laplace(double lambda, double exclusion, double ell, double beta) {
    if (lambda == 0.0 || ell == 0.0) return 0.0;
    if (beta == 4.0) {
        const double l2 = ell * ell;
        const double angle = exclusion == 0.0 ? 0.5 * kPi : std::atan(l2 / (exclusion * exclusion));
        return -kPi * lambda * l2 * angle;
    }
    if (exclusion == 0.0) return -2.0 * kPi * lambda * ell * ell * (kPi / beta) / std::sin(2.0 * kPi / beta);
    const double u = std::pow(ell / exclusion, beta);
    return -2.0 * kPi * lambda * exclusion * exclusion * specfun::interference_tail(beta, u);
}

// ---------------------------------------------------------------------------
// Cluster interference

ClusterInterference::ClusterInterference(const TierLayout& sbs, double beta, ClusterModel model)
    : sbs_(sbs), beta_(beta), model_(model) {
    if (!sbs.is_thomas()) throw std::invalid_argument("ClusterInterference requires a thomas layout");
    sbs.validate("network.sbs");
    if (!(beta > 2.0)) throw DivergentPathlossError(beta);
    scale_ = 2.0 * kPi * sbs.parent_intensity * sbs.sigma * sbs.sigma;
}

double ClusterInterference::v(double b, double inv_l) const {
    const double r = b * inv_l;
    if (beta_ == 4.0) {
        const double r2 = r * r;
        return 1.0 / (1.0 + r2 * r2);
    }
    return 1.0 / (1.0 + std::pow(r, beta_));
}

ClusterInterference::Slice ClusterInterference::slice(double exclusion) const {
    Slice s;
    s.owner_ = this;
    const double rho = exclusion / sbs_.sigma;
    const double m = sbs_.mean_daughters;
    s.rho_ = rho;
    s.t_far_ = rho + kReach;
    s.far_end_ = s.t_far_ + kFarLength;
    if (model_ == ClusterModel::printed) return s;

    const double rho_sib = std::max(rho, kTinyRho);
    s.near_off_.push_back(0);
    panels(std::max(0.0, rho - kReach), s.t_far_, 2.0, 10, [&](double t, double w) {
        const double vd = model_ == ClusterModel::conditioned ? std::exp(-m * marcum_q1_complement(t, rho)) : 1.0;
        s.near_t_.push_back(t);
        s.near_w_.push_back(w * t);
        s.near_void_.push_back(vd);
        s.near_sib_.push_back(w * t * rician_pdf(t, rho_sib) * vd);
        radial_nodes(rho, t + kReach, [&](double b, double wb) {
            s.near_b_.push_back(b);
            s.near_q_.push_back(wb * rician_pdf(t, b));
        });
        s.near_off_.push_back(s.near_b_.size());
    });
    for (double w : s.near_sib_) s.sib_norm_ += w;

    auto add_far = [&](double t, double w) {
        s.far_t_.push_back(t);
        s.far_w_.push_back(w * t);
        kernel_nodes(t, rho, [&](double b, double wb) {
            s.far_b_.push_back(b);
            s.far_q_.push_back(wb * rician_pdf(t, b));
        });
        s.far_off_.push_back(s.far_b_.size());
    };
    s.far_off_.push_back(0);
    panels(s.t_far_, s.far_end_, 2.0, 10, add_far);
    // t = T w^{-p}, p = 1/(beta-2): t dt * t^{-beta} becomes constant in w.
    const double p = 1.0 / (beta_ - 2.0);
    const double top = s.far_end_;
    panels(0.0, 1.0, 1.0, 24, [&](double w, double wt) {
        const double t = top * std::pow(w, -p);
        add_far(t, wt * p * t / w);
    });
    return s;
}

double ClusterInterference::Slice::j_value(const std::vector<std::size_t>& off, const std::vector<double>& b,
                                           const std::vector<double>& q, std::size_t k, double inv_l) const {
    double j = 0.0;
    for (std::size_t n = off[k]; n < off[k + 1]; ++n) j += q[n] * owner_->v(b[n], inv_l);
    return j;
}

double ClusterInterference::Slice::far_adaptive(double inv_l) const {
    const double m = owner_->sbs_.mean_daughters;
    auto f = [&](double t) {
        if (!std::isfinite(t)) return 0.0;
        double j = 0.0;
        kernel_nodes(t, rho_, [&](double b, double wb) { j += wb * rician_pdf(t, b) * owner_->v(b, inv_l); });
        return -t * std::expm1(-m * j);
    };
    QuadratureSpec spec = reference_spec().with_tol(1e-7, 1e-14).with_scale(1.0 / inv_l);
    try {
        return quad(f, t_far_, std::numeric_limits<double>::infinity(), spec);
    } catch (const ConvergenceError& e) {
        // roundoff floor of the mapped tail; the estimate is still far better than needed
        if (e.best().error <= 1e-5 * std::abs(e.best().value)) return e.best().value;
        throw;
    }
}

double ClusterInterference::Slice::log_field(double ell) const {
    const auto& o = *owner_;
    if (ell == 0.0) return 0.0;
    if (o.model_ == ClusterModel::printed) return o.printed_log_field(rho_ * o.sbs_.sigma, ell);
    const double m = o.sbs_.mean_daughters;
    const double inv_l = o.sbs_.sigma / ell;
    double sum = 0.0;
    for (std::size_t k = 0; k < near_t_.size(); ++k) {
        const double j = j_value(near_off_, near_b_, near_q_, k, inv_l);
        sum -= near_w_[k] * near_void_[k] * std::expm1(-m * j);
    }
    if (3.0 / inv_l <= far_end_) {
        for (std::size_t k = 0; k < far_t_.size(); ++k)
            sum -= far_w_[k] * std::expm1(-m * j_value(far_off_, far_b_, far_q_, k, inv_l));
    } else {
        sum += far_adaptive(inv_l);
    }
    return -o.scale_ * sum;
}

double ClusterInterference::Slice::sibling(double ell) const {
    const auto& o = *owner_;
    if (o.model_ != ClusterModel::conditioned || ell == 0.0 || sib_norm_ <= 0.0) return 1.0;
    const double m = o.sbs_.mean_daughters;
    const double inv_l = o.sbs_.sigma / ell;
    double num = 0.0;
    for (std::size_t k = 0; k < near_t_.size(); ++k)
        num += near_sib_[k] * std::exp(-m * j_value(near_off_, near_b_, near_q_, k, inv_l));
    return num / sib_norm_;
}

double ClusterInterference::printed_log_field(double exclusion, double ell) const {
    const double sigma = sbs_.sigma;
    const double rho = exclusion / sigma;
    const double inv_l = sigma / ell;
    const double m = sbs_.mean_daughters;
    const QuadratureSpec spec = reference_spec().with_tol(1e-8, 1e-14);
    auto k = [&](double t) {
        auto g = [&](double u) { return std::exp(-0.5 * u * u) * v(u + t, inv_l); };
        return quad(g, rho, std::max(rho, 0.0) + 40.0, spec) / (std::sqrt(2.0 * kPi) * sigma);
    };
    auto outer = [&](double t) { return -t * std::expm1(-m * k(t)); };
    return -scale_ * quad(outer, 0.0, std::numeric_limits<double>::infinity(),
                          spec.with_scale(std::max(1.0, 1.0 / inv_l)));
}

double ClusterInterference::log_field_reference(double exclusion, double ell) const {
    if (ell == 0.0) return 0.0;
    if (model_ == ClusterModel::printed) return printed_log_field(exclusion, ell);
    const double rho = exclusion / sbs_.sigma;
    const double inv_l = sbs_.sigma / ell;
    const double m = sbs_.mean_daughters;
    const QuadratureSpec spec = reference_spec();
    auto j = [&](double t) {
        const double lo = std::max(rho, t - kReach), hi = t + kReach;
        if (!(hi > lo)) return 0.0;
        return quad([&](double b) { return rician_pdf(t, b) * v(b, inv_l); }, lo, hi, spec.with_tol(1e-11, 1e-300));
    };
    auto outer = [&](double t) {
        const double vd = model_ == ClusterModel::conditioned ? std::exp(-m * marcum_q1_complement(t, rho)) : 1.0;
        return -t * vd * std::expm1(-m * j(t));
    };
    const double near = quad(outer, std::max(0.0, rho - kReach), rho + kReach, spec);
    const double far = quad(outer, rho + kReach, std::numeric_limits<double>::infinity(),
                            spec.with_scale(std::max(1.0, 1.0 / inv_l)));
    return -scale_ * (near + far);
}

double ClusterInterference::sibling_reference(double exclusion, double ell) const {
    if (model_ != ClusterModel::conditioned || ell == 0.0) return 1.0;
    const double rho = std::max(exclusion / sbs_.sigma, kTinyRho);
    const double inv_l = sbs_.sigma / ell;
    const double m = sbs_.mean_daughters;
    const QuadratureSpec spec = reference_spec();
    auto weight = [&](double t) { return t * rician_pdf(t, rho) * std::exp(-m * marcum_q1_complement(t, rho)); };
    auto j = [&](double t) {
        return quad([&](double b) { return rician_pdf(t, b) * v(b, inv_l); }, rho, t + kReach,
                    spec.with_tol(1e-11, 1e-300));
    };
    const double lo = std::max(0.0, rho - kReach), hi = rho + kReach;
    const double num = quad([&](double t) { return weight(t) * std::exp(-m * j(t)); }, lo, hi, spec);
    const double den = quad(weight, lo, hi, spec);
    return den > 0.0 ? num / den : 1.0;
}

// ---------------------------------------------------------------------------
// Rates

bool RateTable::has(int case_id, int tier) const {
    if (case_id < 1 || case_id > 3 || tier < 1 || tier > 3) return false;
    return u[static_cast<std::size_t>(case_id - 1)][static_cast<std::size_t>(tier - 1)].has_value();
}

double RateTable::at(int case_id, int tier) const {
    if (!has(case_id, tier))
        throw std::out_of_range("no rate for case " + std::to_string(case_id) + ", tier " + std::to_string(tier));
    return *u[static_cast<std::size_t>(case_id - 1)][static_cast<std::size_t>(tier - 1)];
}

void RateTable::set(int case_id, int tier, double value) {
    if (case_id < 1 || case_id > 3 || tier < 1 || tier > 3) throw std::out_of_range("rate table index");
    u[static_cast<std::size_t>(case_id - 1)][static_cast<std::size_t>(tier - 1)] = value;
}

RateModel::RateModel(const Association& assoc, ActiveIntensities active, RateOptions opt)
    : assoc_(assoc), active_(active), opt_(opt) {
    for (int n = 1; n <= 3; ++n)
        if (!(active_[n] >= 0.0) || !std::isfinite(active_[n]))
            throw std::invalid_argument("active intensities must be finite and nonnegative");
    if (!(opt_.rel_tol > 0.0) || !(opt_.abs_tol > 0.0)) throw std::invalid_argument("rate tolerances must be positive");
    const auto& cfg = assoc_.config();
    if (cfg.sbs.is_thomas() && active_.sbs > 0.0) cluster_.emplace(cfg.sbs, cfg.pathloss, opt_.model);
}

void RateModel::require_interference(int serving) const {
    (void)serving;
    if (assoc_.config().noise > 0.0) return;
    if (active_.d2d > 0.0 || active_.sbs > 0.0 || active_.mbs > 0.0) return;
    throw std::domain_error("no interferers and no noise: the ergodic rate is unbounded");
}

// Tiers 2 and 3 plus noise, for a link of tier i at distance x.
double RateModel::log_laplace_common(const ClusterInterference::Slice* slice, double s, double x, int i,
                                     bool include_tier1) const {
    const auto& cfg = assoc_.config();
    const double beta = cfg.pathloss;
    double acc = -s * cfg.noise * std::pow(x, beta) / cfg.power[static_cast<std::size_t>(i - 1)];
    for (int n = include_tier1 ? 1 : 2; n <= 3; ++n) {
        const double ell = x * std::pow(s * cfg.power_ratio(n, i), 1.0 / beta);
        if (n == 2 && slice) {
            acc += slice->log_field(ell);
            if (i == 2) acc += std::log(slice->sibling(ell));
            continue;
        }
        acc += ppp_log_laplace(active_[n], cfg.reach(n, i) * x, ell, beta);
    }
    return acc;
}

double RateModel::laplace_case1(double s, double x, int i) const {
    std::optional<ClusterInterference::Slice> slice;
    if (cluster_) slice = cluster_->slice(assoc_.config().reach(2, i) * x);
    return std::exp(log_laplace_common(slice ? &*slice : nullptr, s, x, i, true));
}

double RateModel::laplace_case2(double s, double x, int i) const {
    const auto& cfg = assoc_.config();
    std::optional<ClusterInterference::Slice> slice;
    if (cluster_) slice = cluster_->slice(cfg.reach(2, i) * x);
    const double ell1 = x * std::pow(s * cfg.power_ratio(1, i), 1.0 / cfg.pathloss);
    return std::exp(log_laplace_common(slice ? &*slice : nullptr, s, x, i, false) +
                    ppp_log_laplace(active_.d2d, cfg.d2d_exclusion, ell1, cfg.pathloss));
}

double RateModel::laplace_case3(double s, double x, double y, int j) const {
    const auto& cfg = assoc_.config();
    std::optional<ClusterInterference::Slice> slice;
    if (cluster_) slice = cluster_->slice(cfg.reach(2, j) * y);
    const double ell1 = y * std::pow(s * cfg.power_ratio(1, j), 1.0 / cfg.pathloss);
    return std::exp(log_laplace_common(slice ? &*slice : nullptr, s, y, j, false) +
                    ppp_log_laplace(active_.d2d, x, ell1, cfg.pathloss));
}

// int_0^inf M(s) / (1 + s) ds in v = ln s. M decreases in s, and for short
// links it only dies out at s ~ 1e15, out of reach of a rational map.
double RateModel::s_integral(const std::function<double(double)>& laplace) const {
    constexpr double kLow = -40.0; // int_0^{e^-40} ds <= 4e-18
    double top = 0.0;
    while (laplace(std::exp(top)) > 1e-20) {
        top += 2.0;
        if (top > 700.0) throw std::domain_error("Laplace transform does not vanish: the ergodic rate is unbounded");
    }
    QuadratureSpec spec;
    spec.rel_tol = opt_.rel_tol;
    spec.abs_tol = opt_.abs_tol;
    spec.max_subdivisions = 400;
    return quad([&](double v) { return laplace(std::exp(v)) / (1.0 + std::exp(-v)); }, kLow, top, spec);
}

namespace {

QuadratureSpec outer_spec(const RateOptions& opt) {
    QuadratureSpec spec;
    spec.rel_tol = opt.rel_tol;
    spec.abs_tol = 1e-300;
    spec.max_subdivisions = 400;
    return spec;
}

} // namespace

double RateModel::rate_case1(int i) const {
    if (i < 1 || i > 3) throw std::invalid_argument("case 1 serves from tier 1, 2 or 3");
    require_interference(i);
    const double g = assoc_.tier_prob(i);
    if (!(g > 0.0)) throw MeasureZeroEvent("association to tier " + std::to_string(i) + " has probability zero");
    auto per_x = [&](double x) {
        const double w = assoc_.serving_weight_case1(i, x);
        if (w == 0.0) return 0.0;
        std::optional<ClusterInterference::Slice> slice;
        if (cluster_) slice = cluster_->slice(assoc_.config().reach(2, i) * x);
        const auto* sp = slice ? &*slice : nullptr;
        return w * s_integral([&](double s) { return std::exp(log_laplace_common(sp, s, x, i, true)); });
    };
    return quad(per_x, 0.0, assoc_.support(i), outer_spec(opt_)) / g;
}

double RateModel::rate_case2(int i) const {
    if (i != 2 && i != 3) throw std::invalid_argument("case 2 serves from tier 2 or 3 only");
    require_interference(i);
    const auto& cfg = assoc_.config();
    const double norm = assoc_.pairwise_prob(i, 5 - i);
    if (!(norm > 0.0)) throw MeasureZeroEvent("case-2 association to tier " + std::to_string(i) + " has probability zero");
    auto per_x = [&](double x) {
        const double w = assoc_.serving_weight_case2(i, x);
        if (w == 0.0) return 0.0;
        std::optional<ClusterInterference::Slice> slice;
        if (cluster_) slice = cluster_->slice(cfg.reach(2, i) * x);
        const auto* sp = slice ? &*slice : nullptr;
        return w * s_integral([&](double s) {
                   const double ell1 = x * std::pow(s * cfg.power_ratio(1, i), 1.0 / cfg.pathloss);
                   return std::exp(log_laplace_common(sp, s, x, i, false) +
                                   ppp_log_laplace(active_.d2d, cfg.d2d_exclusion, ell1, cfg.pathloss));
               });
    };
    return quad(per_x, 0.0, assoc_.support(i), outer_spec(opt_)) / norm;
}

double RateModel::rate_case3(int j) const {
    if (j != 2 && j != 3) throw std::invalid_argument("case 3 serves from tier 2 or 3 only");
    require_interference(j);
    const auto& cfg = assoc_.config();
    const int k = 5 - j;
    const double norm = assoc_.ordered_prob(1, j, k);
    if (!(norm > 0.0)) throw MeasureZeroEvent("case-3 event for tier " + std::to_string(j) + " has probability zero");
    const double c1 = cfg.reach(1, j), ck = cfg.reach(k, j);
    const auto& d2d = assoc_.contact(1);
    QuadratureSpec inner = outer_spec(opt_);
    inner.abs_tol = 1e-14;
    auto per_y = [&](double y) {
        const double w = assoc_.contact(j).pdf(y) * assoc_.contact(k).ccdf(ck * y);
        if (w == 0.0) return 0.0;
        const double xmax = std::min(c1 * y, assoc_.support(1));
        std::optional<ClusterInterference::Slice> slice;
        if (cluster_) slice = cluster_->slice(cfg.reach(2, j) * y);
        const auto* sp = slice ? &*slice : nullptr;
        return w * s_integral([&](double s) {
                   const double ell1 = y * std::pow(s * cfg.power_ratio(1, j), 1.0 / cfg.pathloss);
                   const double d2d_part = quad(
                       [&](double x) {
                           return d2d.pdf(x) * std::exp(ppp_log_laplace(active_.d2d, x, ell1, cfg.pathloss));
                       },
                       0.0, xmax, inner);
                   return d2d_part * std::exp(log_laplace_common(sp, s, y, j, false));
               });
    };
    return quad(per_y, 0.0, assoc_.support(j), outer_spec(opt_)) / norm;
}

RateTable RateModel::table() const {
    RateTable t;
    const auto probs = assoc_.all();
    for (int i = 1; i <= 3; ++i)
        if (probs.g[static_cast<std::size_t>(i - 1)] > 0.0) t.set(1, i, rate_case1(i));
    for (int i = 2; i <= 3; ++i) {
        if ((i == 2 ? probs.p23 : probs.p32) > 0.0) t.set(2, i, rate_case2(i));
        if (probs.ordered_prob(1, i, 5 - i) > 0.0) t.set(3, i, rate_case3(i));
    }
    return t;
}

} // namespace hetnet

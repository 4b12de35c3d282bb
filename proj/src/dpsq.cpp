#include "hetnet/dpsq.hpp"

#include "hetnet/errors.hpp"

#include <cmath>
#include <cstdio>

namespace hetnet {

namespace {

constexpr double kTieShift = 1e-6;

double third_term(double wk, double mk, double wi, double mi, SojournForm form) {
    if (form == SojournForm::corrected) return (wk - wi) / (wk * mk + wi * mi);
    const double den = wk * mk - wi * mi;
    if (den != 0.0) return (wk - wi) / den;
    if (wk == wi) return 0.0;
    // removable tie: average of the two one-sided perturbations of mu_k
    auto at_shift = [&](double e) { return (wk - wi) / (wk * mk * (1.0 + e) - wi * mi); };
    return 0.5 * (at_shift(kTieShift) + at_shift(-kTieShift));
}

} // namespace

double DpsInstance::load() const {
    double r = 0.0;
    for (const auto& c : classes) r += c.lambda / c.mu;
    return r;
}

Stability stability_check(const DpsInstance& inst) {
    Stability s;
    for (const auto& c : inst.classes) {
        if (!(c.weight > 0.0) || !std::isfinite(c.weight)) {
            s.stable = false;
            s.reason = "nonpositive weight";
        }
        if (!(c.mu > 0.0) || !std::isfinite(c.mu)) {
            s.stable = false;
            s.reason = "service rate not finite and positive";
        }
        if (!(c.lambda >= 0.0) || !std::isfinite(c.lambda)) {
            s.stable = false;
            s.reason = "arrival rate not finite and nonnegative";
        }
    }
    if (!s.stable) {
        s.load = std::numeric_limits<double>::quiet_NaN();
        return s;
    }
    s.load = inst.load();
    if (!(s.load < s.critical)) {
        s.stable = false;
        s.reason = "load " + std::to_string(s.load) + " is not below 1";
    }
    return s;
}

double dps_sojourn(const DpsInstance& inst, std::size_t i, SojournForm form) {
    if (i >= inst.classes.size()) throw std::out_of_range("dps_sojourn: class index");
    const auto st = stability_check(inst);
    if (!st.stable) throw UnstableQueueError(st.load, st.critical, "DPS queue unstable: " + st.reason);
    const auto& ci = inst.classes[i];
    const double r = st.load;
    double light = 0.0;
    double second = 0.0, weighted_second = 0.0;
    for (const auto& ck : inst.classes) {
        const double rk = ck.lambda / ck.mu;
        light += rk * third_term(ck.weight, ck.mu, ci.weight, ci.mu, form);
        // lambda_D cancels between the two ratios
        second += ck.lambda / (ck.mu * ck.mu);
        weighted_second += ck.lambda / (ck.mu * ck.mu * ck.weight);
    }
    double heavy = 0.0;
    if (weighted_second > 0.0) heavy = r * r / (1.0 - r) / (ci.weight * ci.mu) * second / weighted_second;
    return 1.0 / ci.mu + r / ci.mu + light + heavy;
}

DpsInstance eps_instance(DpsInstance inst) {
    for (auto& c : inst.classes) c.weight = 1.0;
    return inst;
}

std::vector<QosRow> qos_metrics(const DpsInstance& inst, SojournForm form) {
    const bool stable = stability_check(inst).stable;
    std::vector<QosRow> rows;
    for (std::size_t i = 0; i < inst.classes.size(); ++i) {
        const auto& c = inst.classes[i];
        QosRow r;
        r.tier = inst.tier;
        r.row = c.row;
        r.lambda = c.lambda;
        r.mu = c.mu;
        r.weight = c.weight;
        r.rho_prime = c.lambda / c.mu;
        r.stable = stable;
        if (stable) {
            const double s = dps_sojourn(inst, i, form);
            r.d = s;
            r.n = c.lambda * s;
            if (*r.n > 0.0) r.t = r.rho_prime / *r.n;
        }
        rows.push_back(r);
    }
    return rows;
}

DpsInstance tier_instance(const Matrix84& zeta, const Loads& loads, const Matrix84& weights, int col) {
    if (col < 1 || col > 3) throw std::out_of_range("queueing tiers are columns 1..3");
    DpsInstance inst;
    inst.tier = col;
    for (int i = 1; i <= 8; ++i) {
        const double z = at(zeta, i, col);
        if (z == 0.0) continue;
        inst.classes.push_back({z, at(loads.mu, i, col), at(weights, i, col), i});
    }
    return inst;
}

void write_qos_csv(std::ostream& out, const std::vector<QosRow>& rows, bool header) {
    if (header) out << "tier,class,bh_flag,lambda,mu,weight,rho_prime,N,D,T,stable\n";
    char buf[64];
    auto num = [&](double v) {
        std::snprintf(buf, sizeof buf, "%.10g", v);
        return std::string(buf);
    };
    auto opt = [&](const std::optional<double>& v) { return v ? num(*v) : std::string(); };
    for (const auto& r : rows) {
        out << (r.tier ? tier_label(r.tier) : std::string()) << ',' << (r.row ? (r.row + 1) / 2 : 0) << ','
            << (r.row && r.row % 2 == 0 ? 1 : 0) << ',' << num(r.lambda) << ',' << num(r.mu) << ',' << num(r.weight)
            << ',' << num(r.rho_prime) << ',' << opt(r.n) << ',' << opt(r.d) << ',' << opt(r.t) << ','
            << (r.stable ? 1 : 0) << '\n';
    }
}

} // namespace hetnet

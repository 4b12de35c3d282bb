#include "hetnet/montecarlo.hpp"

#include "hetnet/errors.hpp"

#include <boost/math/special_functions/gamma.hpp>

#include <cmath>
#include <limits>
#include <numbers>
#include <random>

namespace hetnet {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr std::size_t kNone = static_cast<std::size_t>(-1);

// salts keep the oracles on unrelated streams for the same seed
constexpr std::uint64_t kSaltAssoc = 1, kSaltRates = 2, kSaltLaplace = 3, kSaltState = 4, kSaltDes = 5;

struct TierDrop {
    std::vector<Point> pts;
    std::vector<double> dist;
    std::size_t nearest = kNone;

    double nearest_dist() const { return nearest == kNone ? kInf : dist[nearest]; }
};

TierDrop drop_tier(const TierLayout& layout, double window, double guard, SplitMix64& rng) {
    TierDrop t;
    if (layout.empty()) return t;
    t.pts = sample_tier(layout, window, guard, rng);
    t.dist.reserve(t.pts.size());
    double best = kInf;
    for (std::size_t k = 0; k < t.pts.size(); ++k) {
        const double d = t.pts[k].norm();
        t.dist.push_back(d);
        if (d < best) {
            best = d;
            t.nearest = k;
        }
    }
    return t;
}

double guard_for(const McRunSpec& spec, const TierLayout& layout, double window) {
    return spec.guard >= 0.0 ? spec.guard : default_guard(layout, window);
}

double exp1(SplitMix64& rng) { return -std::log1p(-rng.uniform()); }

// Tiers ranked by received power P r^-beta, strongest first.
std::array<int, 3> rank_tiers(const std::array<double, 3>& r, const NetworkConfig& cfg) {
    std::array<double, 3> pw{};
    for (int n = 0; n < 3; ++n)
        pw[static_cast<std::size_t>(n)] = std::isfinite(r[static_cast<std::size_t>(n)])
                                              ? cfg.power[static_cast<std::size_t>(n)] *
                                                    std::pow(r[static_cast<std::size_t>(n)], -cfg.pathloss)
                                              : 0.0;
    std::array<int, 3> order{1, 2, 3};
    std::stable_sort(order.begin(), order.end(), [&](int a, int b) {
        return pw[static_cast<std::size_t>(a - 1)] > pw[static_cast<std::size_t>(b - 1)];
    });
    return order;
}

std::size_t ordering_index(const std::array<int, 3>& order) {
    for (std::size_t n = 0; n < AssocProbs::ordered_tiers.size(); ++n)
        if (AssocProbs::ordered_tiers[n] == order) return n;
    throw InternalError("ordering is not a permutation");
}

struct Accumulator {
    double sum = 0.0, sum2 = 0.0;
    std::size_t n = 0;

    void add(double v) {
        sum += v;
        sum2 += v * v;
        ++n;
    }
    MeanEstimate estimate() const {
        MeanEstimate e;
        e.hits = n;
        if (n == 0) return e;
        const double nn = static_cast<double>(n);
        e.mean = sum / nn;
        const double var = n > 1 ? std::max(0.0, (sum2 - nn * e.mean * e.mean) / (nn - 1.0)) : 0.0;
        e.se = std::sqrt(var / nn);
        return e;
    }
};

} // namespace

void McRunSpec::validate() const {
    if (realizations < 1) throw ConfigError("mc.realizations", "must be at least 1");
    if (!(window >= 0.0) || !std::isfinite(window)) throw ConfigError("mc.window", "must be finite and nonnegative");
    if (!std::isfinite(guard)) throw ConfigError("mc.guard", "must be finite");
}

double Proportion::se() const {
    if (trials == 0) return 0.0;
    const double p = value();
    return std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

double association_window(const NetworkConfig& cfg, double factor) {
    double med = 0.0;
    for (int n = 1; n <= 3; ++n) {
        const auto layout = cfg.layout(n);
        if (layout.empty()) continue;
        med = std::max(med, ContactLaw(layout).median());
    }
    if (!(med > 0.0)) throw ConfigError("network", "every tier is empty");
    return factor * med;
}

McAssociation empirical_association(const NetworkConfig& cfg, const McRunSpec& spec) {
    cfg.validate();
    spec.validate();
    McAssociation out;
    out.realizations = spec.realizations;
    out.window = spec.window > 0.0 ? spec.window : association_window(cfg);
    std::array<TierLayout, 3> layouts{cfg.layout(1), cfg.layout(2), cfg.layout(3)};
    std::array<double, 3> guards{};
    for (std::size_t n = 0; n < 3; ++n) {
        guards[n] = guard_for(spec, layouts[n], out.window);
        out.contact[n].reserve(spec.realizations);
    }
    for (auto& p : out.g) p.trials = spec.realizations;
    for (auto& p : out.ordered) p.trials = spec.realizations;
    out.p23.trials = spec.realizations;

    for (std::size_t r = 0; r < spec.realizations; ++r) {
        SplitMix64 rng = stream(spec.seed, r, kSaltAssoc);
        std::array<double, 3> dist{};
        for (std::size_t n = 0; n < 3; ++n) {
            dist[n] = drop_tier(layouts[n], out.window, guards[n], rng).nearest_dist();
            out.contact[n].push_back(dist[n]);
        }
        const auto order = rank_tiers(dist, cfg);
        if (std::isinf(dist[static_cast<std::size_t>(order[0] - 1)])) continue; // nothing in the window
        ++out.g[static_cast<std::size_t>(order[0] - 1)].hits;
        ++out.ordered[ordering_index(order)].hits;
        // tier 2 beats tier 3
        const auto pos2 = std::find(order.begin(), order.end(), 2);
        const auto pos3 = std::find(order.begin(), order.end(), 3);
        if (pos2 < pos3 && std::isfinite(dist[1])) ++out.p23.hits;
    }
    return out;
}

double kolmogorov_tail(double x) {
    if (x <= 0.0) return 1.0;
    if (x < 0.2) return 1.0;
    double sum = 0.0;
    for (int k = 1; k <= 100; ++k) {
        const double term = std::exp(-2.0 * k * k * x * x);
        sum += (k % 2 ? 1.0 : -1.0) * term;
        if (term < 1e-18) break;
    }
    return std::clamp(2.0 * sum, 0.0, 1.0);
}

double chi_square_p(const std::vector<double>& observed, const std::vector<double>& expected, int dof_reduction) {
    if (observed.size() != expected.size()) throw std::invalid_argument("chi_square_p: size mismatch");
    double stat = 0.0;
    int bins = 0;
    for (std::size_t k = 0; k < observed.size(); ++k) {
        if (expected[k] <= 0.0) continue;
        const double d = observed[k] - expected[k];
        stat += d * d / expected[k];
        ++bins;
    }
    const int dof = bins - dof_reduction;
    if (dof < 1) throw std::invalid_argument("chi_square_p: not enough bins");
    return boost::math::gamma_q(0.5 * dof, 0.5 * stat);
}

double rates_window(const NetworkConfig& cfg, const ActiveIntensities& act, double bias) {
    (void)act;
    if (!(bias > 0.0 && bias < 1.0)) throw std::invalid_argument("rates_window: bias must lie in (0, 1)");
    // For an exclusion radius r the mean interference outside r scales as
    // r^{2-beta}; the share beyond W is (r / W)^{beta-2}.
    return association_window(cfg, 1.0) * std::pow(bias, -1.0 / (cfg.pathloss - 2.0));
}

McRates empirical_rates(const NetworkConfig& cfg, const ActiveIntensities& act, const McRunSpec& spec) {
    cfg.validate();
    spec.validate();
    McRates out;
    out.realizations = spec.realizations;
    out.window = spec.window > 0.0 ? spec.window : rates_window(cfg, act);
    const double beta = cfg.pathloss;
    std::array<TierLayout, 3> layouts{cfg.layout(1), cfg.layout(2), cfg.layout(3)};
    const double lambda1 = layouts[0].effective_intensity();
    const double keep1 = lambda1 > 0.0 ? std::min(1.0, act.d2d / lambda1) : 0.0;
    // tiers 2 and 3 transmit in full unless the active intensities say otherwise
    std::array<double, 3> keep{keep1, 1.0, 1.0};
    for (std::size_t n = 1; n < 3; ++n) {
        const double full = layouts[n].effective_intensity();
        keep[n] = full > 0.0 ? std::min(1.0, act[static_cast<int>(n) + 1] / full) : 0.0;
    }
    std::array<std::array<Accumulator, 3>, 3> acc{};

    for (std::size_t r = 0; r < spec.realizations; ++r) {
        SplitMix64 rng = stream(spec.seed, r, kSaltRates);
        std::array<TierDrop, 3> drop;
        std::array<std::vector<double>, 3> gain; // P h r^-beta
        std::vector<char> active1;
        for (std::size_t n = 0; n < 3; ++n) {
            drop[n] = drop_tier(layouts[n], out.window, guard_for(spec, layouts[n], out.window), rng);
            gain[n].resize(drop[n].pts.size());
            for (std::size_t k = 0; k < drop[n].pts.size(); ++k) {
                const double h = spec.fading ? exp1(rng) : 1.0;
                gain[n][k] = cfg.power[n] * h * std::pow(drop[n].dist[k], -beta);
            }
        }
        active1.resize(drop[0].pts.size());
        for (auto& a : active1) a = rng.uniform() < keep1;

        std::array<double, 3> dist{drop[0].nearest_dist(), drop[1].nearest_dist(), drop[2].nearest_dist()};
        const auto order = rank_tiers(dist, cfg);
        if (std::isinf(dist[static_cast<std::size_t>(order[0] - 1)])) continue;

        // Tier sums: active D2D other than the nearest; every SBS and MBS.
        double d2d_far = 0.0;
        for (std::size_t k = 0; k < gain[0].size(); ++k)
            if (active1[k] && k != drop[0].nearest) d2d_far += gain[0][k];
        const std::size_t n1 = drop[0].nearest;
        const double d2d_nearest_active = (n1 != kNone && active1[n1]) ? gain[0][n1] : 0.0;
        std::array<std::vector<char>, 2> on;
        double sum23[2] = {0.0, 0.0};
        for (std::size_t n = 1; n < 3; ++n) {
            auto& flags = on[n - 1];
            flags.assign(gain[n].size(), 1);
            if (keep[n] < 1.0)
                for (auto& f : flags) f = rng.uniform() < keep[n];
            for (std::size_t k = 0; k < gain[n].size(); ++k)
                if (flags[k]) sum23[n - 1] += gain[n][k];
        }
        auto serving_gain = [&](int tier) { return gain[static_cast<std::size_t>(tier - 1)][drop[static_cast<std::size_t>(tier - 1)].nearest]; };
        // share of the server in its tier sum (tiers 2 and 3)
        auto counted = [&](int tier) {
            const auto n = static_cast<std::size_t>(tier - 1);
            return on[n - 1][drop[n].nearest] ? gain[n][drop[n].nearest] : 0.0;
        };
        auto record = [&](int case_id, int tier, double signal, double interference) {
            const double sinr = signal / (interference + cfg.noise);
            acc[static_cast<std::size_t>(case_id - 1)][static_cast<std::size_t>(tier - 1)].add(std::log1p(sinr));
        };

        // Case 1: any tier may serve; active D2D interferers include the nearest one
        // unless it is the server.
        {
            const int s = order[0];
            const double sig = serving_gain(s);
            double interf = d2d_far + sum23[0] + sum23[1];
            if (s == 1) {
                // the server transmits regardless of thinning
            } else {
                interf += d2d_nearest_active;
                interf -= counted(s);
            }
            record(1, s, sig, interf);
        }
        // Case 2: a cache-enabled user picks the stronger of tiers 2 and 3; active
        // D2D nodes beyond the guard radius interfere.
        {
            const auto pos2 = std::find(order.begin(), order.end(), 2);
            const auto pos3 = std::find(order.begin(), order.end(), 3);
            const int s = pos2 < pos3 ? 2 : 3;
            if (std::isfinite(dist[static_cast<std::size_t>(s - 1)])) {
                const double sig = serving_gain(s);
                double interf = sum23[0] + sum23[1] - counted(s);
                for (std::size_t k = 0; k < gain[0].size(); ++k)
                    if (active1[k] && drop[0].dist[k] >= cfg.d2d_exclusion) interf += gain[0][k];
                record(2, s, sig, interf);
            }
        }
        // Case 3: the D2D node is strongest but lacks the content; the runner-up
        // serves and the nearest D2D node stays silent.
        if (order[0] == 1) {
            const int s = order[1];
            if (std::isfinite(dist[static_cast<std::size_t>(s - 1)])) {
                const double sig = serving_gain(s);
                record(3, s, sig, d2d_far + sum23[0] + sum23[1] - counted(s));
            }
        }
    }
    for (std::size_t c = 0; c < 3; ++c)
        for (std::size_t t = 0; t < 3; ++t) out.u[c][t] = acc[c][t].estimate();
    return out;
}

MeanEstimate empirical_ergodic_rate(int case_id, int tier, const NetworkConfig& cfg, const ActiveIntensities& act,
                                    const McRunSpec& spec) {
    const bool valid = (case_id == 1 && tier >= 1 && tier <= 3) || ((case_id == 2 || case_id == 3) && (tier == 2 || tier == 3));
    if (!valid) throw std::invalid_argument("no such (case, tier) cell");
    const auto all = empirical_rates(cfg, act, spec);
    const auto e = all.u[static_cast<std::size_t>(case_id - 1)][static_cast<std::size_t>(tier - 1)];
    if (e.hits < spec.min_hits)
        throw InsufficientSamplesError(e.hits, spec.min_hits,
                                       "case " + std::to_string(case_id) + ", tier " + std::to_string(tier));
    return e;
}

MeanEstimate empirical_laplace_case1(double s, double x, int i, const NetworkConfig& cfg, const ActiveIntensities& act,
                                     const McRunSpec& spec, ClusterModel conditioning) {
    cfg.validate();
    spec.validate();
    if (i < 1 || i > 3) throw std::invalid_argument("serving tier must be 1, 2 or 3");
    if (!(s >= 0.0) || !(x > 0.0)) throw std::invalid_argument("need s >= 0 and x > 0");
    const double beta = cfg.pathloss;
    const double window = spec.window > 0.0 ? spec.window : std::max(rates_window(cfg, act), 20.0 * x);
    const double pi_ = cfg.power[static_cast<std::size_t>(i - 1)];
    const double norm = s * std::pow(x, beta) / pi_;
    std::array<double, 3> excl{};
    for (int n = 1; n <= 3; ++n) excl[static_cast<std::size_t>(n - 1)] = cfg.reach(n, i) * x;
    const TierLayout d2d = TierLayout::poisson(act.d2d);
    const TierLayout mbs = TierLayout::poisson(act.mbs);
    const TierLayout sbs = cfg.sbs.is_thomas() ? cfg.sbs : TierLayout::poisson(act.sbs);
    const double guard = guard_for(spec, sbs, window);
    std::normal_distribution<double> shift(0.0, sbs.sigma > 0.0 ? sbs.sigma : 1.0);
    Accumulator acc;

    for (std::size_t r = 0; r < spec.realizations; ++r) {
        SplitMix64 rng = stream(spec.seed, r, kSaltLaplace);
        double interf = 0.0;
        auto add = [&](const Point& p, int tier) {
            const double d = p.norm();
            if (d < excl[static_cast<std::size_t>(tier - 1)]) return;
            const double h = spec.fading ? exp1(rng) : 1.0;
            interf += cfg.power[static_cast<std::size_t>(tier - 1)] * h * std::pow(d, -beta);
        };
        for (const auto& p : sample_tier(d2d, window, 0.0, rng)) add(p, 1);
        for (const auto& p : sample_tier(mbs, window, 0.0, rng)) add(p, 3);
        if (act.sbs == 0.0) {
            // silent small cells
        } else if (!sbs.is_thomas() || conditioning != ClusterModel::conditioned) {
            for (const auto& p : sample_tier(sbs, window, guard, rng)) add(p, 2);
        } else {
            // Draw until the exclusion disk is empty; with tier 2 serving, the
            // server's own cluster (parent one Gaussian step from it) comes along.
            std::vector<Point> pts;
            for (int attempt = 0;; ++attempt) {
                if (attempt == 100000) throw InternalError("empty-disk conditioning: acceptance too small");
                pts = sample_tier(sbs, window, guard, rng);
                if (i == 2) {
                    const Point parent{x + shift(rng), shift(rng)};
                    std::poisson_distribution<int> count(sbs.mean_daughters);
                    const int nd = count(rng);
                    for (int k = 0; k < nd; ++k) pts.push_back({parent.x + shift(rng), parent.y + shift(rng)});
                }
                bool empty = true;
                for (const auto& p : pts)
                    if (p.norm() < excl[1]) {
                        empty = false;
                        break;
                    }
                if (empty) break;
            }
            for (const auto& p : pts) add(p, 2);
        }
        acc.add(std::exp(-norm * (interf + cfg.noise)));
    }
    return acc.estimate();
}

McStateMatrix empirical_state_matrix(const NetworkConfig& cfg, const Popularity& pop, const McRunSpec& spec) {
    cfg.validate();
    spec.validate();
    const auto& cc = pop.config();
    McStateMatrix out;
    out.realizations = spec.realizations;
    const double window = spec.window > 0.0 ? spec.window : association_window(cfg);
    std::array<TierLayout, 3> layouts{cfg.layout(1), cfg.layout(2), cfg.layout(3)};
    Matrix84 counts{};
    auto draw_rank = [&](double u) {
        int lo = 1, hi = cc.catalog_size;
        while (lo < hi) {
            const int mid = (lo + hi) / 2;
            (pop.range(1, mid) > u ? hi : lo) = mid + (pop.range(1, mid) > u ? 0 : 1);
        }
        return lo;
    };
    for (std::size_t r = 0; r < spec.realizations; ++r) {
        SplitMix64 rng = stream(spec.seed, r, kSaltState);
        std::array<double, 3> dist{};
        for (std::size_t n = 0; n < 3; ++n)
            dist[n] = drop_tier(layouts[n], window, guard_for(spec, layouts[n], window), rng).nearest_dist();
        const bool cached_user = rng.uniform() < cfg.cache_ratio;
        const int k = draw_rank(rng.uniform());
        const auto order = rank_tiers(dist, cfg);
        const bool in_d2d = k <= cc.cache_d2d, in_sbs = k <= cc.cache_sbs;
        int row = 0, col = 0;
        if (cached_user) {
            if (in_d2d) {
                row = 7, col = 4;
            } else {
                const bool sbs_first = std::find(order.begin(), order.end(), 2) < std::find(order.begin(), order.end(), 3);
                if (sbs_first) row = in_sbs ? 3 : 4, col = 2;
                else row = 3, col = 3;
            }
        } else if (order[0] == 1) {
            if (in_d2d) {
                row = 1, col = 1;
            } else if (order[1] == 2) {
                row = in_sbs ? 5 : 6, col = 2;
            } else {
                row = 5, col = 3;
            }
        } else if (order[0] == 2) {
            row = in_sbs ? 1 : 2, col = 2;
        } else {
            row = 1, col = 3;
        }
        at(counts, row, col) += 1.0;
    }
    const double n = static_cast<double>(spec.realizations);
    for (int i = 1; i <= 8; ++i)
        for (int j = 1; j <= 4; ++j) {
            const double p = at(counts, i, j) / n;
            at(out.d, i, j) = p;
            at(out.se, i, j) = std::sqrt(p * (1.0 - p) / n);
        }
    return out;
}

DesResult dps_des(const DpsInstance& inst, std::size_t completions, std::uint64_t seed) {
    const auto st = stability_check(inst);
    if (!st.stable) throw UnstableQueueError(st.load, st.critical, "DES needs a stable queue: " + st.reason);
    if (completions < 10000) throw std::invalid_argument("dps_des: at least 1e4 completions required");
    const std::size_t kc = inst.classes.size();
    constexpr std::size_t kBatches = 20;
    const std::size_t warm = completions / 10;
    const std::size_t batch_size = (completions - warm) / kBatches;
    const std::size_t total = warm + batch_size * kBatches;

    struct Batch {
        double duration = 0.0;
        std::vector<double> area, arrivals, sojourn_sum, done;
    };
    std::vector<Batch> batches(kBatches);
    for (auto& b : batches) b.area.assign(kc, 0.0), b.arrivals.assign(kc, 0.0), b.sojourn_sum.assign(kc, 0.0), b.done.assign(kc, 0.0);

    SplitMix64 rng = stream(seed, 0, kSaltDes);
    std::vector<std::vector<double>> in_system(kc);
    std::vector<double> count(kc, 0.0);
    double lambda_total = 0.0;
    for (const auto& c : inst.classes) lambda_total += c.lambda;
    double t = 0.0;
    std::size_t finished = 0;
    std::vector<double> dep(kc);

    while (finished < total) {
        double wsum = 0.0;
        for (std::size_t k = 0; k < kc; ++k) wsum += inst.classes[k].weight * count[k];
        double rate = lambda_total;
        for (std::size_t k = 0; k < kc; ++k) {
            dep[k] = wsum > 0.0 ? inst.classes[k].mu * inst.classes[k].weight * count[k] / wsum : 0.0;
            rate += dep[k];
        }
        const double dt = exp1(rng) / rate;
        const bool measuring = finished >= warm;
        Batch* batch = measuring ? &batches[std::min((finished - warm) / batch_size, kBatches - 1)] : nullptr;
        if (batch) {
            batch->duration += dt;
            for (std::size_t k = 0; k < kc; ++k) batch->area[k] += count[k] * dt;
        }
        t += dt;
        double u = rng.uniform() * rate;
        std::size_t k = 0;
        bool arrival = false;
        for (; k < kc; ++k) {
            if (u < inst.classes[k].lambda) {
                arrival = true;
                break;
            }
            u -= inst.classes[k].lambda;
        }
        if (arrival) {
            in_system[k].push_back(t);
            count[k] += 1.0;
            if (batch) batch->arrivals[k] += 1.0;
            continue;
        }
        for (k = 0; k + 1 < kc; ++k) {
            if (u < dep[k]) break;
            u -= dep[k];
        }
        while (count[k] == 0.0) k = (k + 1) % kc; // guard against round-off in the selection
        auto& list = in_system[k];
        const std::size_t pick = std::min(static_cast<std::size_t>(rng.uniform() * static_cast<double>(list.size())), list.size() - 1);
        const double sojourn = t - list[pick];
        list[pick] = list.back();
        list.pop_back();
        count[k] -= 1.0;
        if (batch) {
            batch->sojourn_sum[k] += sojourn;
            batch->done[k] += 1.0;
        }
        ++finished;
    }

    DesResult out;
    out.completions = total - warm;
    out.sojourn.assign(kc, 0.0);
    out.sojourn_se.assign(kc, 0.0);
    out.number.assign(kc, 0.0);
    out.number_se.assign(kc, 0.0);
    out.arrival_rate.assign(kc, 0.0);
    out.little_gap.assign(kc, 0.0);
    out.little_se.assign(kc, 0.0);
    auto mean_se = [](const std::vector<double>& v, double& mean, double& se) {
        const double n = static_cast<double>(v.size());
        mean = 0.0;
        for (double x : v) mean += x;
        mean /= n;
        double ss = 0.0;
        for (double x : v) ss += (x - mean) * (x - mean);
        se = v.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
    };
    for (std::size_t k = 0; k < kc; ++k) {
        double time = 0.0, area = 0.0, arrivals = 0.0, ssum = 0.0, done = 0.0;
        std::vector<double> bs, bn, gap;
        for (const auto& b : batches) {
            time += b.duration;
            area += b.area[k];
            arrivals += b.arrivals[k];
            ssum += b.sojourn_sum[k];
            done += b.done[k];
            const double nb = b.area[k] / b.duration;
            bn.push_back(nb);
            if (b.done[k] > 0.0) {
                const double sb = b.sojourn_sum[k] / b.done[k];
                bs.push_back(sb);
                gap.push_back(nb - b.arrivals[k] / b.duration * sb);
            }
        }
        out.sojourn[k] = done > 0.0 ? ssum / done : std::numeric_limits<double>::quiet_NaN();
        out.number[k] = area / time;
        out.arrival_rate[k] = arrivals / time;
        double m = 0.0;
        if (!bs.empty()) mean_se(bs, m, out.sojourn_se[k]);
        mean_se(bn, m, out.number_se[k]);
        if (gap.size() > 1) {
            mean_se(gap, out.little_gap[k], out.little_se[k]);
            if (std::abs(out.little_gap[k]) > 3.0 * out.little_se[k] + 1e-12 * out.number[k]) out.little_ok = false;
        }
        // running mean after three quarters of the batches against the final one
        double part_sum = 0.0, part_done = 0.0;
        for (std::size_t b = 0; b < kBatches * 3 / 4; ++b) {
            part_sum += batches[b].sojourn_sum[k];
            part_done += batches[b].done[k];
        }
        if (part_done > 0.0 && done > 0.0) {
            const double early = part_sum / part_done;
            if (std::abs(early - out.sojourn[k]) > 0.05 * out.sojourn[k]) out.drift_warning = true;
        }
    }
    return out;
}

} // namespace hetnet

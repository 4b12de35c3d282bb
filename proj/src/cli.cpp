#include "hetnet/cli.hpp"

#include "hetnet/errors.hpp"
#include "hetnet/rng.hpp"

#include <json.hpp>

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <memory>
#include <thread>

namespace hetnet {

namespace {

// Everything the analytic pipelines share at one sweep point.
struct Analysis {
    SweepPoint point;
    Scenario s;
    std::unique_ptr<Association> assoc;
    AssocProbs probs;
    Popularity pop;
    ActiveIntensities act;
    Matrix84 d{};

    Analysis(const ConfigMap& cfg, const SweepPoint& p)
        : point(p), s(resolve_scenario(cfg, p.mode, p.value)), pop(s.content) {
        assoc = std::make_unique<Association>(s.network);
        probs = assoc->all();
        act = active_intensities(s.network, probs, pop);
        d = state_matrix(s.network, probs, pop);
    }

    Cell sweep() const {
        if (!point.value) return {};
        return evaluate_expression(*point.value, s.sweep_parameter);
    }
    Cell mode() const { return to_string(point.mode); }

    RateTable rates() const { return RateModel(*assoc, act, s.rates).table(); }
};

Cell opt(const std::optional<double>& v) {
    if (v) return *v;
    return {};
}

using Rows = std::vector<std::vector<Cell>>;

// Evaluates every point on a pool of `jobs` threads and concatenates the
// rows in point order. The first failure, in point order, is rethrown.
template <class Fn>
Rows collect(const std::vector<SweepPoint>& points, std::size_t jobs, Fn&& fn) {
    std::vector<Rows> out(points.size());
    std::vector<std::exception_ptr> errors(points.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
        for (std::size_t k; (k = next.fetch_add(1)) < points.size();) {
            try {
                out[k] = fn(points[k]);
            } catch (...) {
                errors[k] = std::current_exception();
            }
        }
    };
    if (jobs == 0) jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = std::min(jobs, points.size());
    if (jobs <= 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (std::size_t t = 0; t < jobs; ++t) pool.emplace_back(worker);
    }
    Rows rows;
    for (std::size_t k = 0; k < points.size(); ++k) {
        if (errors[k]) std::rethrow_exception(errors[k]);
        for (auto& r : out[k]) rows.push_back(std::move(r));
    }
    return rows;
}

Table start(const std::string& command, const ConfigMap& cfg, const std::vector<std::string>& columns,
            std::size_t& jobs) {
    const auto base = resolve_scenario(cfg);
    Table t;
    t.command = command;
    t.sweep_parameter = base.sweep_parameter;
    for (Mode m : base.modes) {
        std::optional<std::string> first;
        if (!base.sweep_values.empty()) first = base.sweep_values.front();
        auto resolved = resolve_scenario(cfg, m, first).resolved;
        if (!base.sweep_parameter.empty()) resolved[base.sweep_parameter] = "<sweep>";
        resolved.erase("run.jobs"); // does not affect results
        t.config.emplace_back(to_string(m), std::move(resolved));
    }
    t.columns = {"mode", "sweep"};
    t.columns.insert(t.columns.end(), columns.begin(), columns.end());
    jobs = base.jobs;
    return t;
}

// Seed of the Monte Carlo streams at one point.
std::uint64_t point_seed(std::uint64_t seed, const SweepPoint& p, std::uint64_t salt) {
    return stream(seed, p.index, salt)();
}

std::string cell_text(const Cell& c) {
    struct {
        std::string operator()(std::monostate) const { return {}; }
        std::string operator()(double v) const {
            char buf[32];
            std::snprintf(buf, sizeof buf, "%.10g", v);
            return buf;
        }
        std::string operator()(long long v) const { return std::to_string(v); }
        std::string operator()(const std::string& v) const { return v; }
    } visit;
    return std::visit(visit, c);
}

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    return q + '"';
}

// Validation rows -----------------------------------------------------------

struct Check {
    explicit Check(std::string n, std::string v = {}) : name(std::move(n)), verdict(std::move(v)) {}
    std::string name;
    double analytic = NAN;
    double empirical = NAN;
    double se = NAN;
    double deviation = NAN;
    double tolerance = NAN;
    std::string verdict;
};

void push(Rows& rows, const Analysis& a, const Check& c) {
    auto num = [](double v) -> Cell {
        if (std::isnan(v)) return {};
        return v;
    };
    rows.push_back({a.mode(), a.sweep(), c.name, num(c.analytic), num(c.empirical), num(c.se), num(c.deviation),
                    num(c.tolerance), c.verdict});
}

// Proportion against its analytic value within 3 binomial SEs (of the
// analytic p); inconclusive when n p or n (1 - p) is below 50.
Check proportion_check(const std::string& name, double p, const Proportion& e) {
    Check c(name);
    c.analytic = p;
    c.empirical = e.value();
    const double n = static_cast<double>(e.trials);
    c.se = n > 0 ? std::sqrt(std::max(p * (1.0 - p), 0.0) / n) : NAN;
    c.deviation = c.empirical - p;
    c.tolerance = 3.0 * c.se;
    if (n * p < 50.0 || n * (1.0 - p) < 50.0) c.verdict = "inconclusive";
    else c.verdict = std::abs(c.deviation) <= c.tolerance ? "pass" : "fail";
    return c;
}

Rows validate_point(const ConfigMap& cfg, const SweepPoint& p) {
    const Analysis a(cfg, p);
    const auto& s = a.s;
    Rows rows;

    McRunSpec spec = s.mc;
    spec.seed = point_seed(s.mc.seed, p, 1);
    const auto mc = empirical_association(s.network, spec);
    for (int i = 1; i <= 3; ++i)
        push(rows, a, proportion_check("assoc.g" + std::to_string(i), a.probs.g[static_cast<std::size_t>(i - 1)],
                                       mc.g[static_cast<std::size_t>(i - 1)]));
    for (std::size_t k = 0; k < 6; ++k) {
        const auto& o = AssocProbs::ordered_tiers[k];
        push(rows, a,
             proportion_check("assoc.p" + std::to_string(o[0]) + std::to_string(o[1]) + std::to_string(o[2]),
                              a.probs.ordered[k], mc.ordered[k]));
    }
    push(rows, a, proportion_check("assoc.p23", a.probs.p23, mc.p23));

    // Contact distances: empirical = p-value, deviation = KS statistic,
    // tolerance = significance level.
    for (int i = 1; i <= 3; ++i) {
        const auto& law = a.assoc->contact(i);
        Check c("contact.ks" + std::to_string(i));
        if (law.layout().empty()) {
            c.verdict = "inconclusive";
        } else {
            const auto ks = ks_test(mc.contact[static_cast<std::size_t>(i - 1)],
                                    [&](double r) { return 1.0 - law.ccdf(r); });
            c.empirical = ks.p_value;
            c.deviation = ks.statistic;
            c.tolerance = 0.01;
            c.verdict = ks.n < 50 ? "inconclusive" : ks.p_value >= 0.01 ? "pass" : "fail";
        }
        push(rows, a, c);
    }

    spec.seed = point_seed(s.mc.seed, p, 2);
    const auto sm = empirical_state_matrix(s.network, a.pop, spec);
    for (int i = 1; i <= 8; ++i)
        for (int j = 1; j <= 4; ++j) {
            const double dij = at(a.d, i, j);
            if (dij == 0.0) continue;
            Proportion e;
            e.trials = sm.realizations;
            e.hits = static_cast<std::size_t>(std::llround(at(sm.d, i, j) * static_cast<double>(sm.realizations)));
            push(rows, a, proportion_check("state." + class_label(i) + "." + tier_label(j), dij, e));
        }

    // Rates: relative tolerance plus 3 relative SEs of the estimate.
    const auto table = a.rates();
    spec.seed = point_seed(s.mc.seed, p, 3);
    const auto mr = empirical_rates(s.network, a.act, spec);
    const double tol[3] = {0.05, 0.05, 0.07};
    for (int m = 1; m <= 3; ++m)
        for (int j = 1; j <= 3; ++j) {
            if (!table.has(m, j)) continue;
            const auto& e = mr.u[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(j - 1)];
            Check c("rate.u" + std::to_string(m) + std::to_string(j));
            c.analytic = table.at(m, j);
            c.empirical = e.mean;
            c.se = e.se;
            if (e.hits < s.mc.min_hits || !(e.mean > 0.0)) {
                c.verdict = "inconclusive";
            } else {
                c.deviation = (c.analytic - e.mean) / e.mean;
                c.tolerance = tol[m - 1] + 3.0 * e.se / e.mean;
                c.verdict = std::abs(c.deviation) <= c.tolerance ? "pass" : "fail";
            }
            push(rows, a, c);
        }

    // Queues: interpolated sojourn against the DES within 10%, and Little's law.
    const auto zeta = arrival_rates(a.d, s.network, a.act, s.traffic);
    const auto amat = rate_matrix(table, a.d, s.traffic);
    std::optional<Loads> ld;
    try {
        ld = loads(zeta, amat, s.content.content_bits, s.traffic);
    } catch (const UnstableQueueError&) {
    }
    for (int tier : s.qos_tiers) {
        const std::string base = "queue." + tier_label(tier);
        if (!ld) {
            push(rows, a, Check(base, "inconclusive"));
            continue;
        }
        const auto inst = tier_instance(zeta, *ld, s.traffic.weights, tier);
        if (inst.classes.empty()) continue;
        if (!stability_check(inst).stable) {
            push(rows, a, Check(base, "inconclusive"));
            continue;
        }
        const auto des = dps_des(inst, s.des_completions, point_seed(s.mc.seed, p, 4 + static_cast<unsigned>(tier)));
        for (std::size_t k = 0; k < inst.classes.size(); ++k) {
            Check c(base + "." + class_label(inst.classes[k].row) + ".sojourn");
            c.analytic = dps_sojourn(inst, k, s.sojourn_form);
            c.empirical = des.sojourn[k];
            c.se = des.sojourn_se[k];
            c.deviation = (c.analytic - c.empirical) / c.empirical;
            c.tolerance = 0.10;
            c.verdict = std::abs(c.deviation) <= c.tolerance ? "pass" : "fail";
            push(rows, a, c);

            Check l(base + "." + class_label(inst.classes[k].row) + ".little");
            l.analytic = 0.0;
            l.empirical = des.little_gap[k];
            l.se = des.little_se[k];
            l.deviation = des.little_gap[k];
            l.tolerance = 3.0 * des.little_se[k];
            l.verdict = std::abs(l.deviation) <= l.tolerance ? "pass" : "fail";
            push(rows, a, l);
        }
    }
    return rows;
}

} // namespace

std::size_t Table::failures() const {
    const auto it = std::find(columns.begin(), columns.end(), "verdict");
    if (it == columns.end()) return 0;
    const auto k = static_cast<std::size_t>(it - columns.begin());
    std::size_t n = 0;
    for (const auto& r : rows)
        if (const auto* v = std::get_if<std::string>(&r[k]); v && *v == "fail") ++n;
    return n;
}

std::string tool_version() { return HETNET_VERSION; }

std::vector<SweepPoint> sweep_points(const ConfigMap& cfg) {
    const auto base = resolve_scenario(cfg);
    std::vector<SweepPoint> points;
    for (Mode m : base.modes) {
        if (base.sweep_values.empty()) {
            points.push_back({m, std::nullopt, points.size()});
            continue;
        }
        for (const auto& v : base.sweep_values) points.push_back({m, v, points.size()});
    }
    // Fail early on any point that does not resolve.
    for (const auto& p : points) resolve_scenario(cfg, p.mode, p.value);
    return points;
}

Table run_assoc(const ConfigMap& cfg) {
    std::size_t jobs = 0;
    auto t = start("assoc", cfg,
                   {"g1", "g2", "g3", "p123", "p132", "p213", "p231", "p312", "p321", "p23", "case1", "case2",
                    "case3", "case4", "d2d_served"},
                   jobs);
    t.rows = collect(sweep_points(cfg), jobs, [&](const SweepPoint& p) {
        const Analysis a(cfg, p);
        std::vector<Cell> r{a.mode(), a.sweep()};
        for (double g : a.probs.g) r.push_back(g);
        for (double o : a.probs.ordered) r.push_back(o);
        r.push_back(a.probs.p23);
        for (int m = 1; m <= 4; ++m) {
            double sum = 0.0;
            for (int i = 2 * m - 1; i <= 2 * m; ++i)
                for (int j = 1; j <= 4; ++j) sum += at(a.d, i, j);
            r.push_back(sum);
        }
        double d2d = 0.0;
        for (int i = 1; i <= 8; ++i) d2d += at(a.d, i, 1);
        r.push_back(d2d);
        return Rows{r};
    });
    return t;
}

Table run_rates(const ConfigMap& cfg) {
    std::size_t jobs = 0;
    auto t = start("rates", cfg, {"u11", "u12", "u13", "u22", "u23", "u32", "u33", "total"}, jobs);
    t.rows = collect(sweep_points(cfg), jobs, [&](const SweepPoint& p) {
        const Analysis a(cfg, p);
        const auto table = a.rates();
        std::vector<Cell> r{a.mode(), a.sweep()};
        for (auto [m, j] : {std::pair{1, 1}, {1, 2}, {1, 3}, {2, 2}, {2, 3}, {3, 2}, {3, 3}})
            r.push_back(table.has(m, j) ? Cell{table.at(m, j)} : Cell{});
        // Weighted by the probability of each (class, tier) state over the
        // rows that carry a rate (cases 1-3).
        double num = 0.0, den = 0.0;
        for (int i = 1; i <= 6; ++i)
            for (int j = 1; j <= 3; ++j) {
                const int m = (i + 1) / 2;
                const double dij = at(a.d, i, j);
                if (dij == 0.0 || !table.has(m, j)) continue;
                num += dij * table.at(m, j);
                den += dij;
            }
        r.push_back(den > 0.0 ? Cell{num / den} : Cell{});
        return Rows{r};
    });
    return t;
}

Table run_traffic(const ConfigMap& cfg) {
    std::size_t jobs = 0;
    auto t = start("traffic", cfg,
                   {"row", "class", "tier", "d", "zeta", "a_bps", "mu", "rho_prime", "tier_load", "stable"}, jobs);
    t.rows = collect(sweep_points(cfg), jobs, [&](const SweepPoint& p) {
        const Analysis a(cfg, p);
        const auto table = a.rates();
        const auto zeta = arrival_rates(a.d, a.s.network, a.act, a.s.traffic);
        const auto amat = rate_matrix(table, a.d, a.s.traffic);
        std::optional<Loads> ld;
        try {
            ld = loads(zeta, amat, a.s.content.content_bits, a.s.traffic);
        } catch (const UnstableQueueError&) {
        }
        Rows rows;
        for (int i = 1; i <= 8; ++i)
            for (int j = 1; j <= 4; ++j) {
                std::vector<Cell> r{a.mode(), a.sweep(), static_cast<long long>(i), class_label(i), tier_label(j),
                                    at(a.d, i, j), at(zeta, i, j)};
                const double aij = at(amat, i, j);
                r.push_back(std::isfinite(aij) ? Cell{aij} : Cell{std::string("inf")});
                if (j <= 3 && ld) {
                    const auto k = static_cast<std::size_t>(j - 1);
                    r.push_back(at(ld->mu, i, j));
                    r.push_back(at(ld->rho_prime, i, j));
                    r.push_back(ld->total_prime[k]);
                    r.push_back(std::string(ld->total_prime[k] < 1.0 ? "yes" : "no"));
                } else {
                    r.insert(r.end(), {Cell{}, Cell{}, Cell{}, Cell{}});
                    if (j <= 3) r.back() = std::string("no");
                }
                rows.push_back(std::move(r));
            }
        return rows;
    });
    return t;
}

Table run_qos(const ConfigMap& cfg) {
    std::size_t jobs = 0;
    auto t = start("qos", cfg,
                   {"tier", "row", "class", "discipline", "lambda", "mu", "weight", "rho_prime", "stable", "n",
                    "delay_s", "throughput"},
                   jobs);
    t.rows = collect(sweep_points(cfg), jobs, [&](const SweepPoint& p) {
        const Analysis a(cfg, p);
        const auto table = a.rates();
        const auto zeta = arrival_rates(a.d, a.s.network, a.act, a.s.traffic);
        const auto amat = rate_matrix(table, a.d, a.s.traffic);
        const auto ld = loads(zeta, amat, a.s.content.content_bits, a.s.traffic);
        Rows rows;
        for (int tier : a.s.qos_tiers) {
            const auto inst = tier_instance(zeta, ld, a.s.traffic.weights, tier);
            const auto dps = qos_metrics(inst, a.s.sojourn_form);
            const auto eps = qos_metrics(eps_instance(inst), a.s.sojourn_form);
            for (std::size_t k = 0; k < dps.size(); ++k)
                for (const auto* q : {&dps[k], &eps[k]}) {
                    rows.push_back({a.mode(), a.sweep(), static_cast<long long>(tier),
                                    static_cast<long long>(q->row), class_label(q->row),
                                    std::string(q == &dps[k] ? "dps" : "eps"), q->lambda, q->mu, q->weight,
                                    q->rho_prime, std::string(q->stable ? "yes" : "no"), opt(q->n), opt(q->d),
                                    opt(q->t)});
                }
        }
        return rows;
    });
    return t;
}

Table run_validate(const ConfigMap& cfg) {
    std::size_t jobs = 0;
    auto t = start("validate", cfg, {"check", "analytic", "empirical", "se", "deviation", "tolerance", "verdict"},
                   jobs);
    t.rows = collect(sweep_points(cfg), jobs, [&](const SweepPoint& p) { return validate_point(cfg, p); });
    return t;
}

Table run_command(const std::string& name, const ConfigMap& cfg) {
    if (name == "assoc") return run_assoc(cfg);
    if (name == "rates") return run_rates(cfg);
    if (name == "traffic") return run_traffic(cfg);
    if (name == "qos") return run_qos(cfg);
    if (name == "validate") return run_validate(cfg);
    throw ConfigError("run.command", "unknown command '" + name + "'");
}

void write_csv(std::ostream& out, const Table& t) {
    out << "# hetnet " << tool_version() << '\n';
    out << "# command: " << t.command << '\n';
    if (!t.sweep_parameter.empty()) out << "# sweep: " << t.sweep_parameter << '\n';
    for (const auto& [mode, entries] : t.config)
        for (const auto& [k, v] : entries) out << "# " << mode << ": " << k << " = " << v << '\n';
    for (std::size_t k = 0; k < t.columns.size(); ++k) out << (k ? "," : "") << csv_field(t.columns[k]);
    out << '\n';
    for (const auto& r : t.rows) {
        for (std::size_t k = 0; k < r.size(); ++k) out << (k ? "," : "") << csv_field(cell_text(r[k]));
        out << '\n';
    }
}

void write_json(std::ostream& out, const Table& t) {
    nlohmann::ordered_json j;
    j["tool"] = "hetnet";
    j["version"] = tool_version();
    j["command"] = t.command;
    j["sweep"] = t.sweep_parameter;
    auto& config = j["config"];
    config = nlohmann::ordered_json::object();
    for (const auto& [mode, entries] : t.config) {
        auto& m = config[mode];
        for (const auto& [k, v] : entries) m[k] = v;
    }
    j["columns"] = t.columns;
    auto& rows = j["rows"];
    rows = nlohmann::ordered_json::array();
    for (const auto& r : t.rows) {
        nlohmann::ordered_json o = nlohmann::ordered_json::object();
        for (std::size_t k = 0; k < r.size(); ++k) {
            auto& v = o[t.columns[k]];
            if (const auto* d = std::get_if<double>(&r[k])) v = *d;
            else if (const auto* i = std::get_if<long long>(&r[k])) v = *i;
            else if (const auto* s = std::get_if<std::string>(&r[k])) v = *s;
        }
        rows.push_back(std::move(o));
    }
    out << j.dump(2) << '\n';
}

} // namespace hetnet

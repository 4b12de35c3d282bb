#include "hetnet/config.hpp"

#include "hetnet/errors.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numbers>
#include <sstream>

namespace hetnet {

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

bool valid_key(const std::string& k) {
    if (k.empty() || k.front() == '.' || k.back() == '.') return false;
    return std::all_of(k.begin(), k.end(), [](char c) {
        return std::islower(static_cast<unsigned char>(c)) || std::isdigit(static_cast<unsigned char>(c)) || c == '_' ||
               c == '.';
    });
}

class Parser {
public:
    Parser(const std::string& text, const std::string& field) : s_(text), field_(field) {}

    double run() {
        const double v = sum();
        skip();
        if (pos_ != s_.size()) fail("unexpected '" + s_.substr(pos_, 1) + "'");
        if (!std::isfinite(v)) fail("value is not finite");
        return v;
    }

private:
    [[noreturn]] void fail(const std::string& why) const {
        throw ConfigError(field_, "cannot evaluate '" + s_ + "': " + why);
    }
    void skip() {
        while (pos_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[pos_]))) ++pos_;
    }
    bool eat(char c) {
        skip();
        if (pos_ < s_.size() && s_[pos_] == c) {
            ++pos_;
            return true;
        }
        return false;
    }
    double sum() {
        double v = product();
        for (;;) {
            if (eat('+')) v += product();
            else if (eat('-')) v -= product();
            else return v;
        }
    }
    double product() {
        double v = unary();
        for (;;) {
            if (eat('*')) v *= unary();
            else if (eat('/')) v /= unary();
            else return v;
        }
    }
    double unary() {
        if (eat('-')) return -unary();
        if (eat('+')) return unary();
        return power();
    }
    double power() {
        const double base = atom();
        if (eat('^')) return std::pow(base, unary()); // right associative
        return base;
    }
    double atom() {
        skip();
        if (eat('(')) {
            const double v = sum();
            if (!eat(')')) fail("missing ')'");
            return v;
        }
        if (s_.compare(pos_, 2, "pi") == 0) {
            pos_ += 2;
            return std::numbers::pi;
        }
        double v = 0.0;
        const char* first = s_.data() + pos_;
        const auto [ptr, ec] = std::from_chars(first, s_.data() + s_.size(), v);
        if (ec != std::errc() || ptr == first) fail("expected a number");
        pos_ += static_cast<std::size_t>(ptr - first);
        return v;
    }

    const std::string& s_;
    const std::string& field_;
    std::size_t pos_ = 0;
};

enum class Kind { number, integer, text, list, flag };

struct KeyDef {
    std::string key;
    Kind kind;
    std::string fallback; // empty: required where used
};

struct Variant {
    std::string suffix;
    double scale; // to metres, bits or hertz
};

const std::vector<Variant> kLength{{"_m", 1.0}, {"_km", 1e3}};
const std::vector<Variant> kDensity{{"_per_m2", 1.0}, {"_per_km2", 1e-6}};

struct Group {
    std::string stem;
    const std::vector<Variant>* variants;
    std::string fallback;
};

const std::vector<Variant> kBits{{"_bits", 1.0}, {"_mbits", 1e6}};
const std::vector<Variant> kHertz{{"_hz", 1.0}, {"_mhz", 1e6}};

const std::vector<Group>& groups() {
    static const std::vector<Group> g{
        {"network.user_intensity", &kDensity, ""},
        {"network.d2d_exclusion", &kLength, "0"},
        {"sbs.parent_intensity", &kDensity, ""},
        {"sbs.sigma", &kLength, ""},
        {"sbs.intensity", &kDensity, ""},
        {"mbs.intensity", &kDensity, ""},
        {"content.size", &kBits, "100e6"},
        {"traffic.bandwidth", &kHertz, "70e6"},
        {"mc.window", &kLength, "0"},
    };
    return g;
}

const std::vector<KeyDef>& plain_keys() {
    static const std::vector<KeyDef> k = [] {
        std::vector<KeyDef> v{
            {"network.cache_ratio", Kind::number, "0.1"},
            {"network.pathloss", Kind::number, "4"},
            {"network.noise_w", Kind::number, "0"},
            {"network.power_tier1_w", Kind::number, ""},
            {"network.power_tier2_w", Kind::number, ""},
            {"network.power_tier3_w", Kind::number, ""},
            {"sbs.layout", Kind::text, "thomas"},
            {"sbs.mean_daughters", Kind::number, ""},
            {"content.catalog_size", Kind::integer, "1000"},
            {"content.cache_d2d", Kind::integer, "10"},
            {"content.cache_sbs", Kind::integer, "100"},
            {"content.skew", Kind::number, "0.8"},
            {"traffic.request_rate_per_s", Kind::number, "0.2"},
            {"traffic.content_rate", Kind::number, "1"},
            {"traffic.nats_to_bits", Kind::number, "1.443"},
            {"traffic.backhaul_scale", Kind::number, "0.8"},
            {"qos.sojourn_form", Kind::text, "corrected"},
            {"qos.tiers", Kind::list, "1, 2, 3"},
            {"rates.cluster_model", Kind::text, "conditioned"},
            {"rates.rel_tol", Kind::number, "1e-5"},
            {"mc.realizations", Kind::integer, "10000"},
            {"mc.seed", Kind::integer, "1"},
            {"mc.fading", Kind::flag, "true"},
            {"mc.min_hits", Kind::integer, "500"},
            {"mc.des_completions", Kind::integer, "200000"},
            {"sweep.parameter", Kind::text, ""},
            {"sweep.values", Kind::list, ""},
            {"run.mode", Kind::text, "clustered"},
            {"run.command", Kind::text, ""},
            {"run.jobs", Kind::integer, "0"},
        };
        for (int i = 1; i <= 8; ++i)
            for (int j = 1; j <= 4; ++j)
                v.push_back({"qos.weight_" + std::to_string(i) + "_" + std::to_string(j), Kind::number, "1"});
        return v;
    }();
    return k;
}

const KeyDef* find_plain(const std::string& key) {
    for (const auto& d : plain_keys())
        if (d.key == key) return &d;
    return nullptr;
}

const Group* find_group(const std::string& key, const Variant** variant = nullptr) {
    for (const auto& g : groups())
        for (const auto& v : *g.variants)
            if (key == g.stem + v.suffix) {
                if (variant) *variant = &v;
                return &g;
            }
    return nullptr;
}

bool is_known(const std::string& key) { return find_plain(key) || find_group(key); }

bool is_numeric(const std::string& key) {
    if (find_group(key)) return true;
    const auto* d = find_plain(key);
    return d && (d->kind == Kind::number || d->kind == Kind::integer);
}

std::string format_number(double v) {
    char buf[40];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, r.ptr);
}

std::vector<std::string> split_list(const std::string& text) {
    std::vector<std::string> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

// Effective key/value text after overrides, with every lookup checked.
class Resolver {
public:
    explicit Resolver(std::map<std::string, std::string> eff) : eff_(std::move(eff)) {
        for (const auto& [k, v] : eff_)
            if (!is_known(k)) throw ConfigError(k, "unknown key");
        for (const auto& g : groups()) {
            int n = 0;
            for (const auto& v : *g.variants) n += eff_.count(g.stem + v.suffix) ? 1 : 0;
            if (n > 1) throw ConfigError(g.stem, "given in more than one unit");
        }
    }

    bool has_group(const std::string& stem) const {
        for (const auto& g : groups())
            if (g.stem == stem)
                for (const auto& v : *g.variants)
                    if (eff_.count(stem + v.suffix)) return true;
        return false;
    }

    // Value of a unit group converted to the base unit.
    double quantity(const std::string& stem) {
        for (const auto& g : groups()) {
            if (g.stem != stem) continue;
            for (const auto& v : *g.variants) {
                const auto key = stem + v.suffix;
                if (auto it = eff_.find(key); it != eff_.end()) {
                    const double x = evaluate_expression(it->second, key) * v.scale;
                    resolved[key] = format_number(x / v.scale);
                    return x;
                }
            }
            const auto key = stem + g.variants->front().suffix;
            if (g.fallback.empty()) throw ConfigError(key, "required");
            const double x = evaluate_expression(g.fallback, key);
            resolved[key] = format_number(x);
            return x;
        }
        throw InternalError("unknown unit group " + stem);
    }

    std::string text(const std::string& key) {
        const auto* d = find_plain(key);
        if (!d) throw InternalError("unknown key " + key);
        const auto it = eff_.find(key);
        const std::string v = it != eff_.end() ? trim(it->second) : d->fallback;
        resolved[key] = v;
        return v;
    }

    double number(const std::string& key) {
        const std::string v = text(key);
        if (v.empty()) throw ConfigError(key, "required");
        const double x = evaluate_expression(v, key);
        resolved[key] = format_number(x);
        return x;
    }

    long long integer(const std::string& key) {
        const double x = number(key);
        if (x != std::floor(x) || std::abs(x) > 9e15) throw ConfigError(key, "must be an integer");
        resolved[key] = std::to_string(static_cast<long long>(x));
        return static_cast<long long>(x);
    }

    std::size_t count(const std::string& key) {
        const long long v = integer(key);
        if (v < 0) throw ConfigError(key, "must be nonnegative");
        return static_cast<std::size_t>(v);
    }

    bool flag(const std::string& key) {
        const std::string v = text(key);
        if (v == "true" || v == "1" || v == "yes") return true;
        if (v == "false" || v == "0" || v == "no") return false;
        throw ConfigError(key, "expected true or false, got '" + v + "'");
    }

    std::map<std::string, std::string> resolved;

private:
    std::map<std::string, std::string> eff_;
};

} // namespace

double evaluate_expression(const std::string& text, const std::string& field) {
    return Parser(text, field).run();
}

std::string to_string(Mode m) { return m == Mode::clustered ? "clustered" : "baseline"; }

ConfigMap ConfigMap::parse(std::istream& in, const std::string& origin) {
    ConfigMap cfg;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto where = origin + ":" + std::to_string(lineno);
        if (const auto c = line.find_first_of("#;"); c != std::string::npos) line.erase(c);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']') throw ConfigError(where, "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!section.empty() && !valid_key(section)) throw ConfigError(where, "bad section name '" + section + "'");
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ConfigError(where, "expected key = value");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!valid_key(key)) throw ConfigError(where, "bad key '" + key + "'");
        std::string full = section.empty() ? key : section + "." + key;
        auto* target = &cfg.entries_;
        if (full.rfind("baseline.", 0) == 0) {
            full = full.substr(9);
            target = &cfg.baseline_;
        }
        if (!is_known(full)) throw ConfigError(full, "unknown key (" + where + ")");
        if (!target->emplace(full, value).second) throw ConfigError(full, "duplicate key (" + where + ")");
    }
    return cfg;
}

ConfigMap ConfigMap::load(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("", "cannot open config file '" + path + "'");
    return parse(in, path);
}

void ConfigMap::set(const std::string& key, const std::string& value) {
    if (key.rfind("baseline.", 0) == 0) {
        const auto k = key.substr(9);
        if (!is_known(k)) throw ConfigError(k, "unknown key");
        baseline_[k] = value;
        return;
    }
    if (!is_known(key)) throw ConfigError(key, "unknown key");
    entries_[key] = value;
}

std::optional<std::string> ConfigMap::get(const std::string& key) const {
    if (auto it = entries_.find(key); it != entries_.end()) return it->second;
    return std::nullopt;
}

const std::map<std::string, std::string>& known_keys() {
    static const std::map<std::string, std::string> k = [] {
        std::map<std::string, std::string> m;
        for (const auto& d : plain_keys()) m[d.key] = d.fallback;
        for (const auto& g : groups())
            for (const auto& v : *g.variants) m[g.stem + v.suffix] = v.scale == 1.0 ? g.fallback : "";
        return m;
    }();
    return k;
}

Scenario resolve_scenario(const ConfigMap& cfg, Mode mode, const std::optional<std::string>& sweep_value) {
    auto eff = cfg.entries();
    if (mode == Mode::baseline)
        for (const auto& [k, v] : cfg.baseline_overrides()) eff[k] = v;

    const std::string parameter = eff.count("sweep.parameter") ? trim(eff["sweep.parameter"]) : "";
    if (!parameter.empty()) {
        if (!is_numeric(parameter)) throw ConfigError("sweep.parameter", "'" + parameter + "' is not a numeric key");
        if (parameter.rfind("sweep.", 0) == 0 || parameter.rfind("run.", 0) == 0)
            throw ConfigError("sweep.parameter", "cannot sweep '" + parameter + "'");
        if (sweep_value) eff[parameter] = *sweep_value;
    }

    Resolver r(eff);
    Scenario s;

    auto& n = s.network;
    n.user_intensity = r.quantity("network.user_intensity");
    n.cache_ratio = r.number("network.cache_ratio");
    n.pathloss = r.number("network.pathloss");
    n.noise = r.number("network.noise_w");
    n.power = {r.number("network.power_tier1_w"), r.number("network.power_tier2_w"), r.number("network.power_tier3_w")};
    n.d2d_exclusion = r.quantity("network.d2d_exclusion");
    const std::string layout = r.text("sbs.layout");
    if (layout == "thomas") {
        if (r.has_group("sbs.intensity")) throw ConfigError("sbs.intensity", "only for sbs.layout = poisson");
        n.sbs = TierLayout::thomas(r.quantity("sbs.parent_intensity"), r.number("sbs.mean_daughters"),
                                   r.quantity("sbs.sigma"));
    } else if (layout == "poisson") {
        for (const char* k : {"sbs.parent_intensity", "sbs.sigma"})
            if (r.has_group(k)) throw ConfigError(k, "only for sbs.layout = thomas");
        if (eff.count("sbs.mean_daughters")) throw ConfigError("sbs.mean_daughters", "only for sbs.layout = thomas");
        n.sbs = TierLayout::poisson(r.quantity("sbs.intensity"));
    } else {
        throw ConfigError("sbs.layout", "expected thomas or poisson, got '" + layout + "'");
    }
    n.mbs_intensity = r.quantity("mbs.intensity");
    if (mode == Mode::baseline) n = n.baseline();
    try {
        n.validate();
    } catch (const DivergentPathlossError& e) {
        throw ConfigError("network.pathloss", e.what());
    }

    auto& c = s.content;
    auto as_int = [&](const std::string& key) {
        const long long v = r.integer(key);
        if (v < 0 || v > 100000000) throw ConfigError(key, "out of range");
        return static_cast<int>(v);
    };
    c.catalog_size = as_int("content.catalog_size");
    c.cache_d2d = as_int("content.cache_d2d");
    c.cache_sbs = as_int("content.cache_sbs");
    c.skew = r.number("content.skew");
    c.content_bits = r.quantity("content.size");
    c.validate();

    auto& t = s.traffic;
    t.request_rate = r.number("traffic.request_rate_per_s");
    t.content_rate = r.number("traffic.content_rate");
    t.bandwidth_hz = r.quantity("traffic.bandwidth");
    t.nats_to_bits = r.number("traffic.nats_to_bits");
    t.backhaul_scale = r.number("traffic.backhaul_scale");
    for (int i = 1; i <= 8; ++i)
        for (int j = 1; j <= 4; ++j)
            at(t.weights, i, j) = r.number("qos.weight_" + std::to_string(i) + "_" + std::to_string(j));
    t.validate();

    const std::string form = r.text("qos.sojourn_form");
    if (form == "corrected") s.sojourn_form = SojournForm::corrected;
    else if (form == "printed") s.sojourn_form = SojournForm::printed;
    else throw ConfigError("qos.sojourn_form", "expected corrected or printed, got '" + form + "'");
    s.qos_tiers.clear();
    for (const auto& item : split_list(r.text("qos.tiers"))) {
        const double v = evaluate_expression(item, "qos.tiers");
        if (v != 1.0 && v != 2.0 && v != 3.0) throw ConfigError("qos.tiers", "tiers are 1, 2 or 3");
        s.qos_tiers.push_back(static_cast<int>(v));
    }

    s.rates.model = cluster_model_from_string(r.text("rates.cluster_model"));
    s.rates.rel_tol = r.number("rates.rel_tol");
    if (!(s.rates.rel_tol > 0.0 && s.rates.rel_tol < 0.1)) throw ConfigError("rates.rel_tol", "must lie in (0, 0.1)");

    s.mc.realizations = r.count("mc.realizations");
    s.mc.seed = static_cast<std::uint64_t>(r.count("mc.seed"));
    s.mc.window = r.quantity("mc.window");
    s.mc.fading = r.flag("mc.fading");
    s.mc.min_hits = r.count("mc.min_hits");
    s.mc.validate();
    s.des_completions = r.count("mc.des_completions");
    if (s.des_completions < 10000) throw ConfigError("mc.des_completions", "must be at least 10000");

    s.sweep_parameter = r.text("sweep.parameter");
    s.sweep_values = split_list(r.text("sweep.values"));
    if (!s.sweep_parameter.empty() && s.sweep_values.empty()) throw ConfigError("sweep.values", "required with sweep.parameter");
    if (s.sweep_parameter.empty() && !s.sweep_values.empty()) throw ConfigError("sweep.parameter", "required with sweep.values");
    for (const auto& v : s.sweep_values) evaluate_expression(v, "sweep.values");

    const std::string m = r.text("run.mode");
    if (m == "clustered") s.modes = {Mode::clustered};
    else if (m == "baseline") s.modes = {Mode::baseline};
    else if (m == "both") s.modes = {Mode::clustered, Mode::baseline};
    else throw ConfigError("run.mode", "expected clustered, baseline or both, got '" + m + "'");
    s.command = r.text("run.command");
    s.jobs = r.count("run.jobs");

    s.resolved = std::move(r.resolved);
    return s;
}

} // namespace hetnet

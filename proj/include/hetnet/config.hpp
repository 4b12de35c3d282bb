#pragma once

// Scenario files: "key = value" lines under [section] headers, giving dotted
// keys such as sbs.sigma_m. Physical quantities name their unit in the key.
// Values may be arithmetic over numbers and pi so captions can be copied
// as printed. A [baseline] section holds overrides applied in baseline mode.

#include "hetnet/association.hpp"
#include "hetnet/content.hpp"
#include "hetnet/dpsq.hpp"
#include "hetnet/montecarlo.hpp"
#include "hetnet/rates.hpp"
#include "hetnet/traffic.hpp"

#include <istream>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hetnet {

/// Evaluates + - * / ^, parentheses, unary minus, decimal numbers and `pi`.
/// Throws ConfigError naming `field` on malformed input.
double evaluate_expression(const std::string& text, const std::string& field);

enum class Mode { clustered, baseline };
std::string to_string(Mode m);

class ConfigMap {
public:
    static ConfigMap parse(std::istream& in, const std::string& origin = "<input>");
    static ConfigMap load(const std::string& path);

    /// Command-line style override; `key` may carry the baseline. prefix.
    void set(const std::string& key, const std::string& value);
    std::optional<std::string> get(const std::string& key) const;

    const std::map<std::string, std::string>& entries() const noexcept { return entries_; }
    const std::map<std::string, std::string>& baseline_overrides() const noexcept { return baseline_; }

private:
    std::map<std::string, std::string> entries_;
    std::map<std::string, std::string> baseline_;
};

struct Scenario {
    NetworkConfig network;
    ContentConfig content;
    TrafficConfig traffic;
    RateOptions rates;
    SojournForm sojourn_form = SojournForm::corrected;
    std::vector<int> qos_tiers{1, 2, 3};
    McRunSpec mc;
    std::size_t des_completions = 200000;

    std::string command;                    ///< run.command, used by `figure`
    std::vector<Mode> modes{Mode::clustered};
    std::string sweep_parameter;            ///< empty: a single point
    std::vector<std::string> sweep_values;  ///< as written, evaluated per point
    std::size_t jobs = 0;                   ///< 0: hardware concurrency

    /// Every known key with its effective value text, sorted.
    std::map<std::string, std::string> resolved;
};

/// Effective scenario for one mode and optional sweep value. Mode baseline
/// applies the [baseline] overrides and swaps tier 2 for a PPP of equal
/// intensity. Unknown keys, conflicting unit variants and invalid values
/// throw ConfigError with the key path.
Scenario resolve_scenario(const ConfigMap& cfg, Mode mode = Mode::clustered,
                          const std::optional<std::string>& sweep_value = std::nullopt);

/// Known keys with their default value text (empty when none).
const std::map<std::string, std::string>& known_keys();

} // namespace hetnet

#pragma once

// Figure pipelines over a scenario sweep and their tabular output.

#include "hetnet/config.hpp"

#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

namespace hetnet {

using Cell = std::variant<std::monostate, double, long long, std::string>;

struct Table {
    std::string command;
    std::string sweep_parameter;
    /// Resolved configuration per mode, for the header comment.
    std::vector<std::pair<std::string, std::map<std::string, std::string>>> config;
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    /// Rows whose "verdict" column reads "fail".
    std::size_t failures() const;
};

/// One (mode, sweep value) pair of a scenario.
struct SweepPoint {
    Mode mode = Mode::clustered;
    std::optional<std::string> value;
    std::size_t index = 0; ///< position in output order; keys the RNG streams
};

std::vector<SweepPoint> sweep_points(const ConfigMap& cfg);

/// Association probabilities and case aggregates per point.
Table run_assoc(const ConfigMap& cfg);
/// Ergodic rates per (case, tier) and the case-weighted total.
Table run_rates(const ConfigMap& cfg);
/// State, arrival, service-rate and load matrices in long form.
Table run_traffic(const ConfigMap& cfg);
/// Per-class DPS and EPS metrics for the tiers listed in qos.tiers.
Table run_qos(const ConfigMap& cfg);
/// Analytic against Monte Carlo, one row per check with a verdict.
Table run_validate(const ConfigMap& cfg);

/// Dispatch by name: assoc, rates, traffic, qos or validate.
Table run_command(const std::string& name, const ConfigMap& cfg);

void write_csv(std::ostream& out, const Table& t);
void write_json(std::ostream& out, const Table& t);

std::string tool_version();

} // namespace hetnet

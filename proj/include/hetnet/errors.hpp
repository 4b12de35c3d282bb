#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace hetnet {

/// Invalid or inconsistent configuration. `field` is the dotted key path
/// of the offending entry when one is known.
class ConfigError : public std::invalid_argument {
public:
    ConfigError(std::string field, const std::string& what)
        : std::invalid_argument(field.empty() ? what : field + ": " + what),
          field_(std::move(field)) {}

    const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

/// Path-loss exponent at or below 2: the aggregate interference integral
/// diverges.
class DivergentPathlossError : public std::domain_error {
public:
    explicit DivergentPathlossError(double beta)
        : std::domain_error("path-loss exponent must exceed 2, got " + std::to_string(beta)),
          beta_(beta) {}

    double beta() const noexcept { return beta_; }

private:
    double beta_;
};

/// Conditioning event of probability zero (e.g. an empty integration region).
class MeasureZeroEvent : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// Queue outside its stability region.
class UnstableQueueError : public std::runtime_error {
public:
    UnstableQueueError(double load, double critical, const std::string& what)
        : std::runtime_error(what), load_(load), critical_(critical) {}

    double load() const noexcept { return load_; }
    double critical() const noexcept { return critical_; }

private:
    double load_;
    double critical_;
};

/// Monte Carlo estimate requested for an event that occurred too rarely.
class InsufficientSamplesError : public std::runtime_error {
public:
    InsufficientSamplesError(std::size_t achieved, std::size_t required, const std::string& what)
        : std::runtime_error(what + " (" + std::to_string(achieved) + " of " +
                             std::to_string(required) + " samples)"),
          achieved_(achieved), required_(required) {}

    std::size_t achieved() const noexcept { return achieved_; }
    std::size_t required() const noexcept { return required_; }

private:
    std::size_t achieved_;
    std::size_t required_;
};

/// A computed quantity violated an invariant it must satisfy by construction.
class InternalError : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

} // namespace hetnet

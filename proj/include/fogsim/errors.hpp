// Exception types raised by the fogsim library.

#pragma once

#include <stdexcept>
#include <string>

namespace fogsim {

struct Error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct SchedulingInPast : Error {
    using Error::Error;
};

struct UnknownLinkPair : Error {
    using Error::Error;
};

struct NoRoute : Error {
    using Error::Error;
};

// Raised while loading or validating a topology or application config.
// `field` is a JSON-pointer-like path to the offending entry.
struct ConfigError : Error {
    ConfigError(std::string field, const std::string& what)
        : Error(field.empty() ? what : field + ": " + what), field_(std::move(field)) {}

    [[nodiscard]] const std::string& field() const noexcept { return field_; }

private:
    std::string field_;
};

struct CyclicApplication : Error {
    using Error::Error;
};

struct UnplaceableModule : Error {
    using Error::Error;
};

struct ZeroCapacityDevice : Error {
    using Error::Error;
};

struct ClockRegression : Error {
    using Error::Error;
};

struct MissingCell : Error {
    using Error::Error;
};

struct UsageError : Error {
    using Error::Error;
};

} // namespace fogsim

#pragma once

#include <stdexcept>
#include <string>

namespace conncoord {

/// A relative distance left the potential's domain |x| < sqrt(r^2 + Q).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

/// A parameter inequality cannot be satisfied.
class InfeasibleError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Invalid scenario configuration; the message carries the offending key path.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace conncoord

#pragma once

#include <stdexcept>
#include <string>

namespace xwarp {

// Evaluation outside the domain of a closed form (e.g. the singular poles of
// the extreme metric).
class DomainError : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

// Invalid parameters, schedules or configuration values. Raised before any
// computation takes place.
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

}  // namespace xwarp

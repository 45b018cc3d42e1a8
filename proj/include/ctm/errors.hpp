#pragma once

#include <stdexcept>
#include <string>

namespace ctm {

/// Bad arguments or a violated precondition. The CLI maps this to exit code 2.
class UsageError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Invalid network or model configuration (e.g. isolated agent in the LTM).
class ConfigurationError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// Any failure of a numerical procedure. The CLI maps this to exit code 1.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

class IntegrationError : public NumericalError {
public:
    IntegrationError(const std::string& what, double last_good_time)
        : NumericalError(what + " (last good t=" + std::to_string(last_good_time) + ")"),
          last_good_time_(last_good_time) {}

    double last_good_time() const noexcept { return last_good_time_; }

private:
    double last_good_time_;
};

}  // namespace ctm

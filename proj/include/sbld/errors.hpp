#ifndef SBLD_ERRORS_HPP
#define SBLD_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace sbld {

// Bad configuration or unreadable input. The CLI maps this to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Caller violated an operation precondition (empty input, unknown target, ...).
class UsageError : public std::runtime_error {
public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

} // namespace sbld

#endif

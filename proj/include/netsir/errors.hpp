#pragma once

#include <stdexcept>
#include <string>

namespace netsir {

// Raised when an integrator or root finder cannot make progress. CLI maps it to exit code 3.
class NumericalError : public std::runtime_error {
public:
    explicit NumericalError(const std::string& what) : std::runtime_error(what) {}
};

// Malformed configuration or command line. CLI maps it to exit code 2.
class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace netsir

#pragma once

#include <stdexcept>
#include <string>

namespace vo2osc {

/// Invalid or inconsistent configuration input.
class ConfigError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Numerical failure: non-convergence, stability violation, bracket failure.
class SolverError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

}  // namespace vo2osc

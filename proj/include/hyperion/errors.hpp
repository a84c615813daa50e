#pragma once

#include <functional>
#include <stdexcept>
#include <string>

namespace hyperion {

/// Invalid parameters or configuration (bad input, never a numerical fault).
class ConfigError : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// A computation left its region of validity: non-convergence, NaN,
/// norm drift, truncation violation.
class NumericalError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Analysis input that a fit or distance cannot handle.
class AnalysisError : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Warning sink. Defaults to std::clog; tests may redirect it.
using WarningSink = std::function<void(const std::string&)>;
void set_warning_sink(WarningSink sink);
void warn(const std::string& message);

}  // namespace hyperion

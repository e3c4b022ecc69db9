#pragma once

#include <stdexcept>
#include <string>

namespace lfvp {

/// Invalid parameters, malformed configuration files, violated preconditions.
class ConfigError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// NaN/Inf in a residual or any other unrecoverable solver state.
class SolverError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace lfvp

namespace lfvp {

/// Too few peaks or oscillations for a fit, unreadable series.
class FitError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

/// Output files that cannot be written or read back.
class IoError : public std::runtime_error
{
public:
  using std::runtime_error::runtime_error;
};

} // namespace lfvp

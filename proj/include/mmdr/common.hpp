#pragma once

#include <Eigen/Dense>

#include <cstdarg>
#include <cstdio>
#include <stdexcept>
#include <string>

namespace mmdr {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;

/// Base class for all library errors.
struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct InvalidParameterError : Error { using Error::Error; };
struct DimensionMismatchError : Error { using Error::Error; };

/// Raised by CCA when a covariance block is numerically singular.
struct SingularCovarianceError : Error { using Error::Error; };

/// A zero-variance column where a correlation is required.
struct DegenerateColumnError : Error { using Error::Error; };

struct IoError : Error { using Error::Error; };

/// Structurally invalid input file: bad magic, truncated header, ...
struct MalformedFileError : Error { using Error::Error; };

/// printf-style formatting into a std::string.
inline std::string strfmt(const char* fmt, ...)
    __attribute__((format(printf, 1, 2)));

inline std::string strfmt(const char* fmt, ...) {
  va_list ap;
  va_start(ap, fmt);
  va_list ap2;
  va_copy(ap2, ap);
  int n = std::vsnprintf(nullptr, 0, fmt, ap);
  va_end(ap);
  std::string out(n > 0 ? static_cast<size_t>(n) : 0, '\0');
  if (n > 0) std::vsnprintf(out.data(), out.size() + 1, fmt, ap2);
  va_end(ap2);
  return out;
}

}  // namespace mmdr

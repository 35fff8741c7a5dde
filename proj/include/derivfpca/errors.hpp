#pragma once

#include <stdexcept>
#include <string>

namespace derivfpca {

/// Numerical failure: singular or degenerate matrices, non-finite input,
/// degenerate smoothers or covariances.
class NumericError : public std::runtime_error {
 public:
  explicit NumericError(const std::string& what) : std::runtime_error(what) {}
};

/// Malformed or inconsistent data: CSV parse failures, grid mismatches,
/// curves too sparse to fit.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& what) : std::runtime_error(what) {}
};

/// Invalid run configuration (bad parameter combinations, unknown settings).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace derivfpca

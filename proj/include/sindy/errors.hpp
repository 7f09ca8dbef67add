#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace sindy {

// Matrix does not have full column rank (relative to the rank tolerance).
class RankDeficientError : public std::runtime_error {
 public:
  explicit RankDeficientError(const std::string& what) : std::runtime_error(what) {}
};

// Shape mismatch between operands, or a solver entered with m < n.
class DimensionError : public std::invalid_argument {
 public:
  explicit DimensionError(const std::string& what) : std::invalid_argument(what) {}
};

// Iterative kernel failed to meet its tolerance; carries the best estimate.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, double best_estimate)
      : std::runtime_error(what), best_estimate(best_estimate) {}
  double best_estimate;
};

// CSV / config parse failure with a 1-based location.
class ParseError : public std::runtime_error {
 public:
  ParseError(const std::string& file, std::size_t row, std::size_t col, const std::string& what)
      : std::runtime_error(file + ":" + std::to_string(row) + ":" + std::to_string(col) + ": " + what),
        file(file), row(row), col(col) {}
  std::string file;
  std::size_t row;
  std::size_t col;
};

}  // namespace sindy

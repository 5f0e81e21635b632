#pragma once

#include <stdexcept>
#include <string>

namespace polytension {

// All engine errors derive from Error so callers can catch one type.
// Each subclass carries enough context (node index, coordinate, value)
// to identify the offending point without a debugger.

struct Error : std::runtime_error {
  explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad user input: config keys, argument ranges, incompatible grid/scheme combos.
struct ConfigError : Error {
  explicit ConfigError(const std::string& msg) : Error("config error: " + msg) {}
};

// A map left the valid chart region of its target.
struct ChartExitError : Error {
  ChartExitError(const std::string& target, long node, double norm, double bound)
      : Error("chart exit on target '" + target + "': node " + std::to_string(node) +
              " has |y| = " + std::to_string(norm) + " outside bound " +
              std::to_string(bound)) {}
};

// Numerical failure: singular metric, non-finite field value, failed solve.
struct NumericalError : Error {
  explicit NumericalError(const std::string& msg) : Error("numerical error: " + msg) {}
};

}  // namespace polytension

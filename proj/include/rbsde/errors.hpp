#pragma once

#include <stdexcept>
#include <string>

namespace rbsde {

// Bad knobs supplied by the caller: depth out of range, dt <= 0, p <= 1, ...
struct ConfigError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// A model-level invariant failed while building an object (kernel rows not
// summing to one, survival probability hitting zero, ...). Carries the
// offending node when one can be named.
struct ConstructionError : std::runtime_error {
  ConstructionError(const std::string& what, int level, unsigned long long bits)
      : std::runtime_error(what + " at node (level=" + std::to_string(level) +
                           ", bits=" + std::to_string(bits) + ")"),
        level(level),
        bits(bits) {}
  explicit ConstructionError(const std::string& what)
      : std::runtime_error(what), level(-1), bits(0) {}
  int level;
  unsigned long long bits;
};

// An input violated a mathematical precondition (e.g. a process handed to the
// martingale representation is not a martingale).
struct ContractError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Scenario-file syntax problems; position is 1-based when known.
struct ScenarioParseError : std::runtime_error {
  ScenarioParseError(const std::string& what, int line, int column)
      : std::runtime_error(what + " (line " + std::to_string(line) + ", column " +
                           std::to_string(column) + ")"),
        line(line),
        column(column) {}
  explicit ScenarioParseError(const std::string& what)
      : std::runtime_error(what), line(0), column(0) {}
  int line;
  int column;
};

}  // namespace rbsde

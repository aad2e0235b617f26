#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace rabispec {

/// Thrown when the adaptive Fock cutoff reaches its ceiling without the
/// monitored energies settling. Carries the monitored energies of the last
/// two cutoffs tried so callers can inspect how far the iteration got.
class ConvergenceError : public std::runtime_error {
 public:
  ConvergenceError(const std::string& what, std::vector<double> previous,
                   std::vector<double> last)
      : std::runtime_error(what),
        previous_energies(std::move(previous)),
        last_energies(std::move(last)) {}

  std::vector<double> previous_energies;
  std::vector<double> last_energies;
};

/// Thrown by root finders when no sign change exists in the search domain.
class BracketError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Thrown by file ingestion on malformed input; the message names the line.
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rabispec

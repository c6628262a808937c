#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace expkin {

/// Invalid configuration or violated precondition on user input.
class config_error : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// A solver state became unusable (NaN, vacuum, negative temperature).
class numerical_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Non-finite entry found in a field; `index` is the flat offset of the first one.
class nonfinite_error : public numerical_error {
 public:
  nonfinite_error(const std::string& what, std::size_t index)
      : numerical_error(what + " (first non-finite entry at flat index " +
                        std::to_string(index) + ")"),
        index_(index) {}

  std::size_t index() const noexcept { return index_; }

 private:
  std::size_t index_;
};

/// Degenerate macroscopic state (rho <= 0 or T <= 0) in a given spatial cell.
class degenerate_state_error : public numerical_error {
 public:
  degenerate_state_error(const std::string& what, std::size_t cell)
      : numerical_error(what + " in cell " + std::to_string(cell)), cell_(cell) {}

  std::size_t cell() const noexcept { return cell_; }

 private:
  std::size_t cell_;
};

}  // namespace expkin

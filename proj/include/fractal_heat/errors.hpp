#pragma once

#include <stdexcept>

namespace fractal_heat {

// Error taxonomy mirrors the CLI exit codes: argument/validation problems
// exit 2, numerical failures (CG breakdown, divergence, non-finite states)
// exit 3, filesystem problems exit 4.

struct argument_error : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct numerical_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

}  // namespace fractal_heat

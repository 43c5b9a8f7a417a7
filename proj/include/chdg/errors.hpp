// errors.hpp -- exception types shared across the solver library.

#ifndef CHDG_ERRORS_HPP
#define CHDG_ERRORS_HPP

#include <stdexcept>
#include <string>

namespace chdg {

// Linear or nonlinear solve failed to reach its tolerance.
struct SolverError : std::runtime_error {
  SolverError(const std::string& what, double residual_, int iterations_)
      : std::runtime_error(what), residual(residual_), iterations(iterations_) {}
  double residual = 0.0;
  int iterations = 0;
};

// A field value reached or crossed the singular pure-phase values.
struct SeparationError : std::runtime_error {
  SeparationError(const std::string& what, long cell_, double value_)
      : std::runtime_error(what), cell(cell_), value(value_) {}
  long cell = -1;
  double value = 0.0;
};

// Config text rejected; line is 1-based, 0 when not line-specific.
struct ConfigError : std::runtime_error {
  ConfigError(const std::string& what, int line_ = 0)
      : std::runtime_error(what), line(line_) {}
  int line = 0;
};

}  // namespace chdg

#endif

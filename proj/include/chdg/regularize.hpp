// regularize.hpp -- initial-datum smoothing pipeline: clamp into
// [-1+3d, 1-3d], map through arcsin, shifted-Helmholtz solve, map back
// through sin. Produces a uniformly separated datum whose z-level
// H^1-seminorm never exceeds the input's.

#ifndef CHDG_REGULARIZE_HPP
#define CHDG_REGULARIZE_HPP

#include "chdg/grid.hpp"

namespace chdg::regularize {

struct MaxPrincipleReport {
  double min_u = 0.0, max_u = 0.0;
  double lower_margin = 0.0, upper_margin = 0.0;  // distance to -1+3d / 1-3d
  double mean_before = 0.0, mean_after = 0.0;     // mean drift is recorded, not asserted
  bool ok = false;
};

Field clamp_initial(const Field& u0, double delta);

// u0d = sin((I + delta*A_h)^{-1} arcsin(clamp_initial(u0)));
// output stays in [-1+3d, 1-3d] cellwise.
Field regularize_initial(const Field& u0, double delta);

// checks -1+3d <= u0d <= 1-3d; throws SeparationError naming the worst cell
// on violation, otherwise reports extrema and margins.
MaxPrincipleReport maximum_principle_check(const Field& u0, const Field& u0delta, double delta);

}  // namespace chdg::regularize

#endif

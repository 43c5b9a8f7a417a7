#include "chdg/regularize.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "chdg/errors.hpp"
#include "chdg/grid_ops.hpp"
#include "chdg/model.hpp"

namespace chdg::regularize {

namespace {
void require_delta(double delta) {
  if (!(delta > 0.0 && delta < 1.0 / 6.0))
    throw std::invalid_argument("regularize: delta must lie in (0, 1/6)");
}
}  // namespace

Field clamp_initial(const Field& u0, double delta) {
  require_delta(delta);
  const double hi = 1.0 - 3.0 * delta;
  Field out = u0;
  for (double& v : out.values) {
    if (!std::isfinite(v)) throw std::invalid_argument("clamp_initial: non-finite input");
    v = std::clamp(v, -hi, hi);
  }
  return out;
}

Field regularize_initial(const Field& u0, double delta) {
  require_delta(delta);
  Field z = clamp_initial(u0, delta);
  for (double& v : z.values) v = model::phi(v);
  Field zs = grid_ops::solve_shifted_helmholtz(z, delta);
  for (double& v : zs.values) v = std::sin(v);
  // (I + delta*A_h)^{-1} is an M-matrix inverse, so z stays inside the clamp
  // interval up to solver tolerance; snap the tolerance-level excess back.
  const double hi = 1.0 - 3.0 * delta;
  for (double& v : zs.values) v = std::clamp(v, -hi, hi);
  return zs;
}

MaxPrincipleReport maximum_principle_check(const Field& u0, const Field& u0delta, double delta) {
  require_delta(delta);
  require_same_grid(u0, u0delta, "maximum_principle_check");
  const double hi = 1.0 - 3.0 * delta;
  MaxPrincipleReport rep;
  rep.min_u = u0delta.min();
  rep.max_u = u0delta.max();
  rep.lower_margin = rep.min_u - (-hi);
  rep.upper_margin = hi - rep.max_u;
  rep.mean_before = grid_ops::mean(u0);
  rep.mean_after = grid_ops::mean(u0delta);
  rep.ok = rep.lower_margin >= 0.0 && rep.upper_margin >= 0.0;
  if (!rep.ok) {
    const long n = u0delta.size();
    for (long c = 0; c < n; ++c) {
      const double v = u0delta.values[c];
      if (v < -hi || v > hi)
        throw SeparationError("maximum_principle_check: bound violated at cell " +
                                  std::to_string(c) + " (value " + std::to_string(v) + ")",
                              c, v);
    }
  }
  return rep;
}

}  // namespace chdg::regularize

#include "chdg/diagnostics.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "chdg/errors.hpp"
#include "chdg/grid_ops.hpp"

namespace chdg::diagnostics {

namespace {
void require_inside(const Field& u, const char* where) {
  const long n = u.size();
  for (long c = 0; c < n; ++c)
    if (!(std::abs(u.values[c]) < 1.0))
      throw SeparationError(std::string(where) + ": |u| >= 1 at cell " + std::to_string(c), c,
                            u.values[c]);
}
}  // namespace

double energy(const Field& u, const ModelParams& p) {
  require_inside(u, "energy");
  const Field gsq = grid_ops::gradient_sq(u);
  double s = 0.0;
  const long n = u.size();
  for (long c = 0; c < n; ++c) {
    const double r = u.values[c];
    s += 0.5 * model::a(r) * gsq.values[c] + model::F(r) - 0.5 * p.lambda * r * r;
  }
  return s * u.grid.cell_volume();
}

double gradient_energy(const Field& u) {
  require_inside(u, "gradient_energy");
  const Field gsq = grid_ops::gradient_sq(u);
  double s = 0.0;
  const long n = u.size();
  for (long c = 0; c < n; ++c) s += 0.5 * model::a(u.values[c]) * gsq.values[c];
  return s * u.grid.cell_volume();
}

double dissipation_residual(const Field& u_old, const Field& u_new, const Field& w_new,
                            const ModelParams& p, double dt) {
  require_same_grid(u_old, u_new, "dissipation_residual");
  const double de = energy(u_new, p) - energy(u_old, p);
  const double gw = grid_ops::seminorm_h1(w_new);
  double ut2 = 0.0;
  const long n = u_new.size();
  for (long c = 0; c < n; ++c) {
    const double d = (u_new.values[c] - u_old.values[c]) / dt;
    ut2 += d * d;
  }
  ut2 *= u_new.grid.cell_volume();
  return de + dt * (gw * gw + p.epsilon * ut2);
}

std::array<double, 3> entropy_monitors(const Field& u, const ModelParams& p) {
  require_inside(u, "entropy_monitors");
  Field v(u.grid);
  const long n = u.size();
  for (long c = 0; c < n; ++c) v.values[c] = model::f(u.values[c]);
  const Field gsq = grid_ops::gradient_sq(v);
  const Field lap = grid_ops::laplacian(v);
  double eg = 0.0, el = 0.0, eq = 0.0;
  for (long c = 0; c < n; ++c) {
    const double vv = v.values[c];
    const double mw = model::m_weight(vv, p.entropy_p);
    eg += mw * gsq.values[c];
    el += mw * lap.values[c] * lap.values[c];
    const double av = std::abs(vv);
    eq += (1.0 + av * av * av) / std::pow(1.0 + vv * vv, p.entropy_p + 2.0) * gsq.values[c] *
          gsq.values[c];
  }
  const double vol = u.grid.cell_volume();
  return {eg * vol, el * vol, eq * vol};
}

double vprime_distance(const Field& u1, const Field& u2) {
  require_same_grid(u1, u2, "vprime_distance");
  const double m1 = grid_ops::mean(u1), m2 = grid_ops::mean(u2);
  if (!(std::abs(m1 - m2) <= 1e-10))
    throw std::invalid_argument("vprime_distance: means differ by " + std::to_string(m1 - m2) +
                                "; V' distance needs a zero-mean difference");
  Field d(u1.grid);
  const long n = u1.size();
  for (long c = 0; c < n; ++c) d.values[c] = u1.values[c] - u2.values[c];
  const double md = grid_ops::mean(d);
  for (double& v : d.values) v -= md;
  return grid_ops::norm_vprime_zero_mean(d);
}

Record make_record(double t, const Field& u, const Field& u_old, const Field& w_new,
                   const ModelParams& p, double dt) {
  Record r;
  r.t = t;
  r.mass = grid_ops::mean(u);
  r.energy = energy(u, p);
  r.gradient_energy = gradient_energy(u);
  r.dissipation_residual = dt > 0.0 ? dissipation_residual(u_old, u, w_new, p, dt) : 0.0;
  r.min_u = u.min();
  r.max_u = u.max();
  r.separation_gap = 1.0 - u.max_abs();
  const auto ent = entropy_monitors(u, p);
  r.entropy_m_grad = ent[0];
  r.entropy_m_lap = ent[1];
  r.entropy_quartic = ent[2];
  return r;
}

}  // namespace chdg::diagnostics

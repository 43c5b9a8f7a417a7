// diagnostics.hpp -- the monitored functionals: free energy and its gradient
// part, the dissipation-identity residual, separation gap, entropy-weight
// integrals, and the V' distance used by paired-run stability checks.

#ifndef CHDG_DIAGNOSTICS_HPP
#define CHDG_DIAGNOSTICS_HPP

#include <array>
#include <optional>

#include "chdg/grid.hpp"
#include "chdg/model.hpp"

namespace chdg::diagnostics {

struct Record {
  double t = 0.0;
  double mass = 0.0;
  double energy = 0.0;
  double gradient_energy = 0.0;
  double dissipation_residual = 0.0;
  double min_u = 0.0;
  double max_u = 0.0;
  double separation_gap = 0.0;  // 1 - max|u|
  double entropy_m_grad = 0.0;
  double entropy_m_lap = 0.0;
  double entropy_quartic = 0.0;
  std::optional<double> vprime_distance;  // only for paired runs; not in CSV
};

// E(u) = integral of a(u)/2 |grad u|^2 + F(u) - lambda u^2/2
double energy(const Field& u, const ModelParams& p);

// J(u) = integral of a(u)/2 |grad u|^2
double gradient_energy(const Field& u);

// E(u_new) - E(u_old) + dt*(||grad w_new||^2 + eps*||(u_new-u_old)/dt||^2);
// <= 0 up to roundoff for the convex-splitting scheme.
double dissipation_residual(const Field& u_old, const Field& u_new, const Field& w_new,
                            const ModelParams& p, double dt);

// (integral m(v)|grad v|^2, integral m(v)|lap v|^2,
//  integral (1+|v|^3)/(1+v^2)^{p+2} |grad v|^4), with v = f(u)
std::array<double, 3> entropy_monitors(const Field& u, const ModelParams& p);

// ||u1 - u2||_{V'}; means must agree to 1e-10
double vprime_distance(const Field& u1, const Field& u2);

// one full time-series row; u_old/w_new from the step that produced u
Record make_record(double t, const Field& u, const Field& u_old, const Field& w_new,
                   const ModelParams& p, double dt);

}  // namespace chdg::diagnostics

#endif

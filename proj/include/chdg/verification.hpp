// verification.hpp -- independent desk-scale oracles: the Dal Passo-Garcke-
// Gruen integration-by-parts identity checked by high-order quadrature, the
// linearized dispersion rate, cross-formulation equivalence orders, a
// high-accuracy explicit reference integrator, and the delta-continuation
// study.

#ifndef CHDG_VERIFICATION_HPP
#define CHDG_VERIFICATION_HPP

#include <functional>
#include <map>
#include <string>
#include <vector>

#include "chdg/grid.hpp"
#include "chdg/model.hpp"
#include "chdg/stepper.hpp"

namespace chdg::verification {

struct OracleReport {
  std::string name;
  std::string inputs;
  double measured = 0.0;
  double reference = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::map<std::string, double> extra;  // named side values (discrete gaps, orders, ...)
};

// analytic Neumann profile z = amp * cos(kx pi x / Lx) [* cos(ky pi y / Ly)];
// phase must be 0: anything else violates the no-flux condition and is
// rejected.
struct CosProfile {
  double amp = 1.0;
  int kx = 1;
  int ky = 0;
  double phase = 0.0;
};

// scalar h with two bounded derivatives
struct SmoothFn {
  std::string name;
  std::function<double(double)> h, h1, h2;
};

SmoothFn h_square();       // h(s) = s^2
SmoothFn h_entropy();      // h(s) = 1/(2(1+s^2))
SmoothFn h_cos();          // h(s) = cos(s)

// checks int h'(z)|grad z|^2 lap z = -1/3 int h''(z)|grad z|^4
//   + 2/3 int h(z)(|D2 z|^2 - |lap z|^2)  (boundary term vanishes on boxes).
// measured/reference are the two quadrature sides; extra carries the
// discrete-stencil sides evaluated on the given grid.
OracleReport dpgg_identity_check(const Grid& g, const CosProfile& z, const SmoothFn& h);

// growth rate of the mode cos(q pi x / L) linearized about u = m:
//   sigma = -qh^2 (a(m)(qh^2 + 1) - lambda) / (1 + eps qh^2),  qh = q pi / L
double dispersion_sigma(double m, const ModelParams& p, int q_mode, double L);

// evaluates the three chemical-potential formulations on meshes n, 2n, 4n
// and measures the decay order of the pairwise sup-norm discrepancies;
// measured = worst pair order, reference = 2.
OracleReport formulation_equivalence_suite(const std::function<double(double)>& u_profile,
                                           int n_base, double L, const ModelParams& p,
                                           const std::string& name);

// adaptive Dormand-Prince 5(4) on the same spatial discretization,
// local tolerance 1e-10; ground truth for the implicit stepper.
Field reference_integrate(const Field& initial, const ModelParams& p, double t_end,
                          double tol = 1e-10);

// full pipeline (regularize + integrate) across a delta schedule; checks
// Cauchy behavior of u(t_end) in L2 and a delta-independent positive
// separation floor at tau.
OracleReport delta_continuation_study(const Field& u0, const ModelParams& base,
                                      const StepperConfig& cfg,
                                      const std::vector<double>& deltas, double t_end,
                                      double tau);

}  // namespace chdg::verification

#endif

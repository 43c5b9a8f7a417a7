// stepper.hpp -- implicit time integration of the coupled system
//   (u+ - u)/dt = lap w+,
//   w+ = dE_conv/du(u+) - lambda*u_expl + eps*(u+ - u)/dt,
// where dE_conv/du is the exact variational derivative of the discrete
// convex energy (face-averaged divergence form + truncated potential) and
// u_expl is u (convex_splitting, unconditionally energy stable) or u+
// (backward_euler_full). Mass is conserved to roundoff by construction.

#ifndef CHDG_STEPPER_HPP
#define CHDG_STEPPER_HPP

#include <functional>
#include <vector>

#include "chdg/diagnostics.hpp"
#include "chdg/grid.hpp"
#include "chdg/model.hpp"

namespace chdg {

enum class Scheme { backward_euler_full, convex_splitting };

struct StepperConfig {
  Scheme scheme = Scheme::convex_splitting;
  double dt = 0.0;           // 0 = default 1e-4 (L/pi)^4 / a(0)
  double newton_tol = 1e-11;
  int newton_max_iter = 50;
  double clip_margin = 0.0;  // distance of iterates from +-(1-delta); 0 = delta/2
  Potential potential = Potential::truncated;

  double effective_dt(const Grid& g) const;
  double effective_clip_margin(const ModelParams& p) const;
  void validate(const ModelParams& p) const;
};

struct SimState {
  double t = 0.0;
  Field u;
  Field w;
  Field u_prev;  // state before the last step; u_prev == u at t = 0
  long step_index = 0;
};

struct NewtonReport {
  int iterations = 0;
  std::vector<double> residuals;  // sup-norm history, includes entry residual
  bool converged = false;
  bool clipped_at_solution = false;
};

namespace stepper {

// variational derivative of the convex discrete energy
// sum_faces abar/2 (Du)^2 vol + sum_cells F(u) vol  (no lambda, no eps term)
Field mu_variational(const Field& u, const ModelParams& p, Potential kind);

SimState init_state(const Field& u0, const ModelParams& p, const StepperConfig& cfg);

struct NewtonResult {
  Field u;
  Field w;
  NewtonReport report;
};

// one damped Newton solve of the stacked (u+, w+) system from the given guess
NewtonResult newton_solve(const SimState& state, const ModelParams& p, const StepperConfig& cfg,
                          double dt, const Field& guess_u, const Field& guess_w);

// advance one step of size cfg.effective_dt (or dt_override if > 0);
// throws SolverError advising a smaller dt when Newton fails.
SimState step(const SimState& state, const ModelParams& p, const StepperConfig& cfg,
              double dt_override = 0.0);

using RecordSink = std::function<void(const diagnostics::Record&)>;
using StateSink = std::function<void(const SimState&)>;

struct RunStats {
  long steps = 0;
  long dt_halvings = 0;
  double final_dt = 0.0;
};

// integrate to t_end, emitting a record at t=0 and every stride-th accepted
// step (plus the final one); halves dt and retries on Newton failure.
// state_sink, when set, sees every accepted state.
SimState run(const Field& initial, const ModelParams& p, const StepperConfig& cfg, double t_end,
             const RecordSink& emit = {}, int stride = 1, const StateSink& state_sink = {},
             RunStats* stats = nullptr);

}  // namespace stepper
}  // namespace chdg

#endif

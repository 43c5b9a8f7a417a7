#include "chdg/stepper.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "chdg/banded.hpp"
#include "chdg/errors.hpp"
#include "chdg/grid_ops.hpp"

namespace chdg {

double StepperConfig::effective_dt(const Grid& g) const {
  if (dt > 0.0) return dt;
  double lmax = 0.0;
  for (int d = 0; d < g.ndims; ++d) lmax = std::max(lmax, g.length[d]);
  const double s = lmax / M_PI;
  return 1e-4 * s * s * s * s / model::a(0.0);
}

double StepperConfig::effective_clip_margin(const ModelParams& p) const {
  return clip_margin > 0.0 ? clip_margin : 0.5 * p.delta;
}

void StepperConfig::validate(const ModelParams& p) const {
  if (dt < 0.0) throw std::invalid_argument("stepper: dt must be positive");
  if (!(newton_tol > 0.0 && newton_tol <= 1e-6))
    throw std::invalid_argument("stepper: newton_tol must lie in (0, 1e-6]");
  if (newton_max_iter < 1) throw std::invalid_argument("stepper: newton_max_iter must be >= 1");
  const double m = effective_clip_margin(p);
  if (!(m > 0.0 && m < p.delta))
    throw std::invalid_argument("stepper: clip margin must lie in (0, delta)");
}

namespace stepper {

namespace {

// iterates are kept at distance >= margin from the blow-up points +-(1-delta),
// where both constitutive pairs are finite and smooth
double clip_bound(const ModelParams& p, const StepperConfig& cfg) {
  return 1.0 - p.delta - cfg.effective_clip_margin(p);
}

double sup_norm(const std::vector<double>& v) {
  double m = 0.0;
  for (double x : v) m = std::max(m, std::abs(x));
  return m;
}

struct System {
  const Grid& g;
  const ModelParams& p;
  const StepperConfig& cfg;
  double dt;
  const Field& u_old;

  // residuals of the stacked system, u-scaled first block:
  //   r1 = u - u_old + dt * A_h w
  //   r2 = w - mu_variational(u) + lambda*u_expl - (eps/dt)(u - u_old)
  void residual(const Field& u, const Field& w, std::vector<double>& r) const {
    const long n = g.cells();
    const Field aw = grid_ops::laplacian(w);
    const Field mu = mu_variational(u, p, cfg.potential);
    const bool full = cfg.scheme == Scheme::backward_euler_full;
    for (long c = 0; c < n; ++c) {
      const double uex = full ? u.values[c] : u_old.values[c];
      r[2 * c] = u.values[c] - u_old.values[c] - dt * aw.values[c];
      r[2 * c + 1] = w.values[c] - mu.values[c] + p.lambda * uex -
                     (p.epsilon / dt) * (u.values[c] - u_old.values[c]);
    }
  }

  void assemble_jacobian(const Field& u, BandMatrix& jac) const {
    jac.reset();
    const long n = g.cells();
    const bool full = cfg.scheme == Scheme::backward_euler_full;
    const Potential kind = cfg.potential;
    // diagonal blocks
    for (long c = 0; c < n; ++c) {
      jac.add(2 * c, 2 * c, 1.0);          // d r1 / d u
      jac.add(2 * c + 1, 2 * c + 1, 1.0);  // d r2 / d w
      const double diag_u = model::f_prime_of(u.values[c], p, kind) + p.epsilon / dt -
                            (full ? p.lambda : 0.0);
      jac.add(2 * c + 1, 2 * c, -diag_u);
    }
    // face terms: -dt*lap w in r1, and the Hessian of the gradient energy in r2
    grid_ops::for_each_face(g, [&](int, long cl, long cr, double inv_h) {
      jac.add(2 * cl, 2 * cl + 1, dt * inv_h * inv_h);
      jac.add(2 * cl, 2 * cr + 1, -dt * inv_h * inv_h);
      jac.add(2 * cr, 2 * cr + 1, dt * inv_h * inv_h);
      jac.add(2 * cr, 2 * cl + 1, -dt * inv_h * inv_h);

      const double ul = u.values[cl], ur = u.values[cr];
      const double du = (ur - ul) * inv_h;
      const double al = model::a_of(ul, p, kind), ar = model::a_of(ur, p, kind);
      const double apl = model::a_prime_of(ul, p, kind), apr = model::a_prime_of(ur, p, kind);
      const double asl = model::a_second_of(ul, p, kind), asr = model::a_second_of(ur, p, kind);
      const double abar = 0.5 * (al + ar);
      const double h_ll = 0.25 * asl * du * du - apl * du * inv_h + abar * inv_h * inv_h;
      const double h_rr = 0.25 * asr * du * du + apr * du * inv_h + abar * inv_h * inv_h;
      const double h_lr = 0.5 * (apl - apr) * du * inv_h - abar * inv_h * inv_h;
      jac.add(2 * cl + 1, 2 * cl, -h_ll);
      jac.add(2 * cr + 1, 2 * cr, -h_rr);
      jac.add(2 * cl + 1, 2 * cr, -h_lr);
      jac.add(2 * cr + 1, 2 * cl, -h_lr);
    });
  }
};

}  // namespace

Field mu_variational(const Field& u, const ModelParams& p, Potential kind) {
  const double limit = (kind == Potential::raw) ? 1.0 - 1e-15 : 1.0 - p.delta - 1e-15;
  const long n = u.size();
  for (long c = 0; c < n; ++c)
    if (!(std::abs(u.values[c]) < limit) || !std::isfinite(u.values[c]))
      throw SeparationError("mu_variational: separation violated at cell " + std::to_string(c) +
                                " (value " + std::to_string(u.values[c]) + ")",
                            c, u.values[c]);
  Field out(u.grid);
  grid_ops::for_each_face(u.grid, [&](int, long cl, long cr, double inv_h) {
    const double ul = u.values[cl], ur = u.values[cr];
    const double du = (ur - ul) * inv_h;
    const double abar = 0.5 * (model::a_of(ul, p, kind) + model::a_of(ur, p, kind));
    out.values[cl] += 0.25 * model::a_prime_of(ul, p, kind) * du * du - abar * du * inv_h;
    out.values[cr] += 0.25 * model::a_prime_of(ur, p, kind) * du * du + abar * du * inv_h;
  });
  for (long c = 0; c < n; ++c) out.values[c] += model::f_of(u.values[c], p, kind);
  return out;
}

SimState init_state(const Field& u0, const ModelParams& p, const StepperConfig& cfg) {
  p.validate();
  cfg.validate(p);
  SimState s;
  s.t = 0.0;
  s.u = u0;
  s.u_prev = u0;
  s.w = mu_variational(u0, p, cfg.potential);
  for (long c = 0; c < u0.size(); ++c) s.w.values[c] -= p.lambda * u0.values[c];
  s.step_index = 0;
  return s;
}

NewtonResult newton_solve(const SimState& state, const ModelParams& p, const StepperConfig& cfg,
                          double dt, const Field& guess_u, const Field& guess_w) {
  const Grid& g = state.u.grid;
  const long n = g.cells();
  System sys{g, p, cfg, dt, state.u};
  const double bound = clip_bound(p, cfg);

  NewtonResult res{guess_u, guess_w, {}};
  bool clipped = false;
  for (double& v : res.u.values) {
    const double cv = std::clamp(v, -bound, bound);
    if (cv != v) clipped = true;
    v = cv;
  }

  std::vector<double> r(2 * n), r_try(2 * n);
  sys.residual(res.u, res.w, r);
  double rn = sup_norm(r);
  res.report.residuals.push_back(rn);
  if (rn <= cfg.newton_tol) {
    res.report.converged = true;
    res.report.clipped_at_solution = clipped;
    return res;
  }

  const int max_stride = (g.ndims == 2) ? g.n[1] : 1;
  const int bw = 2 * max_stride + 1;
  BandMatrix jac(2 * n, bw, bw);
  std::vector<double> s(2 * n);
  Field u_try(g), w_try(g);

  for (int it = 1; it <= cfg.newton_max_iter; ++it) {
    sys.assemble_jacobian(res.u, jac);
    jac.factor();
    for (long i = 0; i < 2 * n; ++i) s[i] = -r[i];
    jac.solve(s);

    double alpha = 1.0;
    double rn_try = rn;
    bool accepted = false;
    for (int ls = 0; ls < 30; ++ls) {
      clipped = false;
      for (long c = 0; c < n; ++c) {
        double uv = res.u.values[c] + alpha * s[2 * c];
        const double cv = std::clamp(uv, -bound, bound);
        if (cv != uv) clipped = true;
        u_try.values[c] = cv;
        w_try.values[c] = res.w.values[c] + alpha * s[2 * c + 1];
      }
      sys.residual(u_try, w_try, r_try);
      rn_try = sup_norm(r_try);
      if (rn_try < rn * (1.0 - 1e-4 * alpha)) {
        accepted = true;
        break;
      }
      alpha *= 0.5;
    }
    if (!accepted) {
      res.report.iterations = it;
      res.report.converged = false;
      return res;
    }
    res.u = u_try;
    res.w = w_try;
    r.swap(r_try);
    rn = rn_try;
    res.report.residuals.push_back(rn);
    res.report.iterations = it;
    if (rn <= cfg.newton_tol) {
      res.report.converged = true;
      res.report.clipped_at_solution = clipped;
      return res;
    }
  }
  res.report.converged = false;
  return res;
}

SimState step(const SimState& state, const ModelParams& p, const StepperConfig& cfg,
              double dt_override) {
  p.validate();
  cfg.validate(p);
  const double dt = dt_override > 0.0 ? dt_override : cfg.effective_dt(state.u.grid);
  NewtonResult nr = newton_solve(state, p, cfg, dt, state.u, state.w);
  if (!nr.report.converged)
    throw SolverError("step: Newton did not reach tolerance " + std::to_string(cfg.newton_tol) +
                          " in " + std::to_string(nr.report.iterations) +
                          " iterations at t=" + std::to_string(state.t) +
                          "; retry with a smaller dt",
                      nr.report.residuals.back(), nr.report.iterations);
  if (nr.report.clipped_at_solution)
    throw SolverError("step: iterate left the separation-safe interval at t=" +
                          std::to_string(state.t) + "; retry with a smaller dt",
                      nr.report.residuals.back(), nr.report.iterations);

  // re-derive u+ from w+ through the divergence-form update so the discrete
  // mean is conserved to roundoff independent of the Newton tolerance
  SimState next;
  next.t = state.t + dt;
  next.step_index = state.step_index + 1;
  next.u_prev = state.u;
  next.w = nr.w;
  next.u = state.u;
  const Field lw = grid_ops::laplacian(nr.w);
  for (long c = 0; c < next.u.size(); ++c) next.u.values[c] += dt * lw.values[c];
  return next;
}

SimState run(const Field& initial, const ModelParams& p, const StepperConfig& cfg, double t_end,
             const RecordSink& emit, int stride, const StateSink& state_sink, RunStats* stats) {
  if (t_end < 0.0) throw std::invalid_argument("run: t_end must be >= 0");
  if (stride < 1) throw std::invalid_argument("run: stride must be >= 1");
  SimState s = init_state(initial, p, cfg);
  const double dt0 = cfg.effective_dt(initial.grid);
  if (emit) emit(diagnostics::make_record(0.0, s.u, s.u, s.w, p, 0.0));
  if (state_sink) state_sink(s);

  double dt = dt0;
  long halvings = 0;
  const double t_eps = 1e-12 * std::max(t_end, dt0);
  while (s.t < t_end - t_eps) {
    const double dt_step = std::min(dt, t_end - s.t);
    try {
      SimState next = step(s, p, cfg, dt_step);
      const double used_dt = next.t - s.t;
      const bool last = next.t >= t_end - t_eps;
      if (emit && (next.step_index % stride == 0 || last))
        emit(diagnostics::make_record(next.t, next.u, s.u, next.w, p, used_dt));
      s = std::move(next);
      if (state_sink) state_sink(s);
    } catch (const SolverError& e) {
      dt *= 0.5;
      ++halvings;
      if (dt < dt0 * std::pow(0.5, 30))
        throw SolverError("run: dt halving exhausted at step " + std::to_string(s.step_index) +
                              ", t=" + std::to_string(s.t) + ": " + e.what(),
                          e.residual, e.iterations);
    }
  }
  if (stats) {
    stats->steps = s.step_index;
    stats->dt_halvings = halvings;
    stats->final_dt = dt;
  }
  return s;
}

}  // namespace stepper
}  // namespace chdg

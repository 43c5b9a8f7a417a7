#include "chdg/model.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "chdg/errors.hpp"
#include "chdg/grid_ops.hpp"

namespace chdg {

void ModelParams::validate() const {
  if (!(lambda >= 0.0)) throw std::invalid_argument("model: lambda must be >= 0");
  if (!(epsilon >= 0.0)) throw std::invalid_argument("model: epsilon must be >= 0");
  if (!(delta > 0.0 && delta < 1.0 / 6.0))
    throw std::invalid_argument("model: delta must lie in (0, 1/6)");
  if (!(entropy_p > 0.5 && entropy_p <= 1.0))
    throw std::invalid_argument("model: entropy exponent p must lie in (1/2, 1]");
  if (k_delta != 0.0 && k_delta < model::a(1.0 - delta))
    throw std::invalid_argument("model: k_delta must be >= a(1-delta) for a continuous cap");
}

double ModelParams::k_delta_effective() const {
  return k_delta != 0.0 ? k_delta : model::a(1.0 - delta / 2.0);
}

namespace model {

namespace {

[[noreturn]] void domain_fail(const char* fn, double r) {
  throw std::domain_error(std::string(fn) + ": argument " + std::to_string(r) +
                          " outside admissible range");
}

// quintic Hermite blend on [t0, t1] matching (v,d,c) at both ends
struct Quintic {
  double t0, w;
  double v0, d0, c0, v1, d1, c1;
  double eval(double t) const {
    const double s = (t - t0) / w;
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s, s5 = s4 * s;
    const double H0 = 1 - 10 * s3 + 15 * s4 - 6 * s5;
    const double H1 = s - 6 * s3 + 8 * s4 - 3 * s5;
    const double H2 = 0.5 * (s2 - 3 * s3 + 3 * s4 - s5);
    const double H3 = 10 * s3 - 15 * s4 + 6 * s5;
    const double H4 = -4 * s3 + 7 * s4 - 3 * s5;
    const double H5 = 0.5 * (s3 - 2 * s4 + s5);
    return v0 * H0 + d0 * w * H1 + c0 * w * w * H2 + v1 * H3 + d1 * w * H4 + c1 * w * w * H5;
  }
  double deriv(double t) const {
    const double s = (t - t0) / w;
    const double s2 = s * s, s3 = s2 * s, s4 = s3 * s;
    const double H0 = -30 * s2 + 60 * s3 - 30 * s4;
    const double H1 = 1 - 18 * s2 + 32 * s3 - 15 * s4;
    const double H2 = 0.5 * (2 * s - 9 * s2 + 12 * s3 - 5 * s4);
    const double H3 = 30 * s2 - 60 * s3 + 30 * s4;
    const double H4 = -12 * s2 + 28 * s3 - 15 * s4;
    const double H5 = 0.5 * (3 * s2 - 8 * s3 + 5 * s4);
    return (v0 * H0 + d0 * w * H1 + c0 * w * w * H2 + v1 * H3 + d1 * w * H4 + c1 * w * w * H5) / w;
  }
  double deriv2(double t) const {
    const double s = (t - t0) / w;
    const double s2 = s * s, s3 = s2 * s;
    const double H0 = -60 * s + 180 * s2 - 120 * s3;
    const double H1 = -36 * s + 96 * s2 - 60 * s3;
    const double H2 = 0.5 * (2 - 18 * s + 36 * s2 - 20 * s3);
    const double H3 = 60 * s - 180 * s2 + 120 * s3;
    const double H4 = -24 * s + 84 * s2 - 60 * s3;
    const double H5 = 0.5 * (6 * s - 24 * s2 + 20 * s3);
    return (v0 * H0 + d0 * w * H1 + c0 * w * w * H2 + v1 * H3 + d1 * w * H4 + c1 * w * w * H5) /
           (w * w);
  }
};

Quintic a_blend(const ModelParams& p) {
  const double t0 = 1.0 - p.delta;
  return Quintic{t0, p.delta, a(t0), a_prime(t0), a_second(t0), p.k_delta_effective(), 0.0, 0.0};
}

// barrier added on top of f outside [-1+2d, 1-2d]:
//   b(t) = t^3 / (delta - t),  t = |r| - (1-2*delta) in (0, delta)
// nonnegative, C^2-flat at the junction, diverges at |r| = 1-delta.
double barrier(double t, double delta) { return t * t * t / (delta - t); }
double barrier_prime(double t, double delta) {
  const double d = delta - t;
  return (3.0 * t * t * d + t * t * t) / (d * d);
}

}  // namespace

double F(double r) {
  if (std::abs(r) > 1.0 || !std::isfinite(r)) domain_fail("F", r);
  const double um = 1.0 - r, up = 1.0 + r;
  const double tm = um > 0.0 ? um * std::log(um) : 0.0;
  const double tp = up > 0.0 ? up * std::log(up) : 0.0;
  return tm + tp;
}

double f(double r) {
  if (std::abs(r) >= 1.0 || !std::isfinite(r)) domain_fail("f", r);
  return std::log1p(r) - std::log1p(-r);
}

double a(double r) {
  if (std::abs(r) >= 1.0 || !std::isfinite(r)) domain_fail("a", r);
  return 2.0 / (1.0 - r * r);
}

double a_prime(double r) {
  if (std::abs(r) >= 1.0 || !std::isfinite(r)) domain_fail("a_prime", r);
  const double q = 1.0 - r * r;
  return 4.0 * r / (q * q);
}

double a_second(double r) {
  if (std::abs(r) >= 1.0 || !std::isfinite(r)) domain_fail("a_second", r);
  const double q = 1.0 - r * r;
  return 4.0 * (1.0 + 3.0 * r * r) / (q * q * q);
}

double phi(double r) {
  if (std::abs(r) > 1.0 || !std::isfinite(r)) domain_fail("phi", r);
  return std::asin(r);
}

double phi_prime(double r) {
  if (std::abs(r) >= 1.0 || !std::isfinite(r)) domain_fail("phi_prime", r);
  return 1.0 / std::sqrt(1.0 - r * r);
}

double j(double v) {
  if (!std::isfinite(v)) domain_fail("j", v);
  return std::tanh(0.5 * v);
}

double j_prime(double v) {
  if (!std::isfinite(v)) domain_fail("j_prime", v);
  const double t = std::tanh(0.5 * v);
  return 0.5 * (1.0 - t * t);
}

double m_weight(double v, double p) {
  if (!(p > 0.5 && p <= 1.0)) throw std::invalid_argument("m_weight: p must lie in (1/2, 1]");
  return 0.5 / std::pow(1.0 + v * v, p);
}

double m_weight_prime(double v, double p) {
  if (!(p > 0.5 && p <= 1.0)) throw std::invalid_argument("m_weight_prime: p must lie in (1/2, 1]");
  return -p * v / std::pow(1.0 + v * v, p + 1.0);
}

double m_weight_second(double v, double p) {
  if (!(p > 0.5 && p <= 1.0))
    throw std::invalid_argument("m_weight_second: p must lie in (1/2, 1]");
  return ((2.0 * p * p + p) * v * v - p) / std::pow(1.0 + v * v, p + 2.0);
}

double f_delta(double r, const ModelParams& p) {
  const double edge = 1.0 - p.delta;
  if (!(std::abs(r) < edge)) domain_fail("f_delta", r);
  const double inner = 1.0 - 2.0 * p.delta;
  if (std::abs(r) <= inner) return f(r);
  const double t = std::abs(r) - inner;
  const double b = barrier(t, p.delta);
  return f(r) + (r > 0 ? b : -b);
}

double f_delta_prime(double r, const ModelParams& p) {
  const double edge = 1.0 - p.delta;
  if (!(std::abs(r) < edge)) domain_fail("f_delta_prime", r);
  const double inner = 1.0 - 2.0 * p.delta;
  if (std::abs(r) <= inner) return a(r);
  return a(r) + barrier_prime(std::abs(r) - inner, p.delta);
}

double a_delta(double r, const ModelParams& p) {
  if (!std::isfinite(r)) domain_fail("a_delta", r);
  const double t = std::abs(r);
  if (t <= 1.0 - p.delta) return a(r);
  if (t >= 1.0) return p.k_delta_effective();
  return a_blend(p).eval(t);
}

double a_delta_prime(double r, const ModelParams& p) {
  if (!std::isfinite(r)) domain_fail("a_delta_prime", r);
  const double t = std::abs(r);
  if (t <= 1.0 - p.delta) return a_prime(r);
  if (t >= 1.0) return 0.0;
  const double d = a_blend(p).deriv(t);
  return r > 0 ? d : -d;
}

double a_delta_second(double r, const ModelParams& p) {
  if (!std::isfinite(r)) domain_fail("a_delta_second", r);
  const double t = std::abs(r);
  if (t <= 1.0 - p.delta) return a_second(r);
  if (t >= 1.0) return 0.0;
  return a_blend(p).deriv2(t);
}

double f_of(double r, const ModelParams& p, Potential kind) {
  return kind == Potential::raw ? f(r) : f_delta(r, p);
}
double f_prime_of(double r, const ModelParams& p, Potential kind) {
  return kind == Potential::raw ? a(r) : f_delta_prime(r, p);
}
double a_of(double r, const ModelParams& p, Potential kind) {
  return kind == Potential::raw ? a(r) : a_delta(r, p);
}
double a_prime_of(double r, const ModelParams& p, Potential kind) {
  return kind == Potential::raw ? a_prime(r) : a_delta_prime(r, p);
}
double a_second_of(double r, const ModelParams& p, Potential kind) {
  return kind == Potential::raw ? a_second(r) : a_delta_second(r, p);
}

namespace {

void require_separated(const Field& u, double limit, const char* where) {
  const long n = u.size();
  for (long c = 0; c < n; ++c)
    if (!(std::abs(u.values[c]) <= limit) || !std::isfinite(u.values[c]))
      throw SeparationError(std::string(where) + ": separation violated at cell " +
                                std::to_string(c) + " (value " + std::to_string(u.values[c]) + ")",
                            c, u.values[c]);
}

void require_consistent(const Field& got, const Field& expect, double tol, const char* where) {
  require_same_grid(got, expect, where);
  const long n = got.size();
  for (long c = 0; c < n; ++c)
    if (!(std::abs(got.values[c] - expect.values[c]) <= tol))
      throw std::invalid_argument(std::string(where) + ": inconsistent companion field at cell " +
                                  std::to_string(c));
}

}  // namespace

Field mu_residual_u(const Field& u, const Field& u_t, const ModelParams& p, Potential kind) {
  require_same_grid(u, u_t, "mu_residual_u");
  const double limit = kind == Potential::raw ? 1.0 - 1e-6 : 1.0 - p.delta - 1e-12;
  require_separated(u, limit, "mu_residual_u");
  const Field lap_u = grid_ops::laplacian(u);
  const Field gsq = grid_ops::gradient_sq(u);
  Field w(u.grid);
  const long n = u.size();
  for (long c = 0; c < n; ++c) {
    const double r = u.values[c];
    w.values[c] = -a_of(r, p, kind) * lap_u.values[c] -
                  0.5 * a_prime_of(r, p, kind) * gsq.values[c] + f_of(r, p, kind) -
                  p.lambda * r + p.epsilon * u_t.values[c];
  }
  return w;
}

Field mu_residual_z(const Field& u, const Field& z, const Field& u_t, const ModelParams& p) {
  require_same_grid(u, u_t, "mu_residual_z");
  require_separated(u, 1.0 - 1e-6, "mu_residual_z");
  Field z_expect(u.grid);
  for (long c = 0; c < u.size(); ++c) z_expect.values[c] = phi(u.values[c]);
  require_consistent(z, z_expect, 1e-10, "mu_residual_z");
  const Field lap_z = grid_ops::laplacian(z);
  Field w(u.grid);
  for (long c = 0; c < u.size(); ++c) {
    const double r = u.values[c];
    w.values[c] = -2.0 * phi_prime(r) * lap_z.values[c] + f(r) - p.lambda * r +
                  p.epsilon * u_t.values[c];
  }
  return w;
}

Field mu_residual_v(const Field& u, const Field& v, const Field& u_t, const ModelParams& p) {
  require_same_grid(u, u_t, "mu_residual_v");
  require_separated(u, 1.0 - 1e-12, "mu_residual_v");
  Field v_expect(u.grid);
  for (long c = 0; c < u.size(); ++c) v_expect.values[c] = f(u.values[c]);
  require_consistent(v, v_expect, 1e-10, "mu_residual_v");
  const Field lap_v = grid_ops::laplacian(v);
  const Field gsq_v = grid_ops::gradient_sq(v);
  Field w(u.grid);
  for (long c = 0; c < u.size(); ++c) {
    const double jv = j(v.values[c]);
    w.values[c] = -lap_v.values[c] + v.values[c] + 0.5 * jv * gsq_v.values[c] - p.lambda * jv +
                  p.epsilon * u_t.values[c];
  }
  return w;
}

}  // namespace model
}  // namespace chdg

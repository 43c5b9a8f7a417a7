// model.hpp -- scalar constitutive functions of the singular-diffusion
// Cahn-Hilliard model, their truncated counterparts, and the chemical
// potential evaluated in the three equivalent formulations (u, z, v).
//
//   F(r) = (1-r)log(1-r) + (1+r)log(1+r)        logarithmic potential
//   f(r) = log((1+r)/(1-r)) = F'(r)
//   a(r) = 2/(1-r^2) = f'(r)                     singular gradient coefficient
//   phi(r) = arcsin r,   z = phi(u)              linearizes the gradient energy
//   j(v) = (e^v-1)/(e^v+1) = tanh(v/2) = f^{-1}  inverse of f
//   m(v) = 1/(2(1+v^2)^p)                        entropy test-function weight

#ifndef CHDG_MODEL_HPP
#define CHDG_MODEL_HPP

#include "chdg/grid.hpp"

namespace chdg {

struct ModelParams {
  double lambda = 0.0;        // interaction strength, >= 0
  double epsilon = 0.0;       // viscosity, >= 0
  double delta = 1.0 / 32.0;  // truncation parameter, in (0, 1/6)
  double entropy_p = 1.0;     // entropy-weight exponent, in (1/2, 1]
  double k_delta = 0.0;       // cap of a_delta; 0 = default a(1 - delta/2)

  void validate() const;
  double k_delta_effective() const;
};

// which constitutive pair a field evaluation uses
enum class Potential { raw, truncated };

namespace model {

double F(double r);         // on [-1, 1], boundary limits by continuity
double f(double r);         // on (-1, 1)
double a(double r);         // on (-1, 1)
double a_prime(double r);   // 4r/(1-r^2)^2
double a_second(double r);  // 4(1+3r^2)/(1-r^2)^3

double phi(double r);        // arcsin r, on [-1, 1]
double phi_prime(double r);  // 1/sqrt(1-r^2), on (-1, 1)

double j(double v);        // total, stable for large |v|
double j_prime(double v);  // 2e^v/(e^v+1)^2

double m_weight(double v, double p);
double m_weight_prime(double v, double p);
double m_weight_second(double v, double p);

// truncated potential derivative: equals f on [-1+2d, 1-2d], monotone,
// |f_delta| >= |f|, blows up at +-(1-delta); domain (-1+delta, 1-delta).
double f_delta(double r, const ModelParams& p);
double f_delta_prime(double r, const ModelParams& p);

// truncated gradient coefficient: equals a on [-1+delta, 1-delta], constant
// K_delta outside (-1, 1), C^2 quintic blend between; 1 <= a_delta <= K_delta.
double a_delta(double r, const ModelParams& p);
double a_delta_prime(double r, const ModelParams& p);
double a_delta_second(double r, const ModelParams& p);

// dispatch helpers
double f_of(double r, const ModelParams& p, Potential kind);
double f_prime_of(double r, const ModelParams& p, Potential kind);
double a_of(double r, const ModelParams& p, Potential kind);
double a_prime_of(double r, const ModelParams& p, Potential kind);
double a_second_of(double r, const ModelParams& p, Potential kind);

// chemical potential, collocated stencil forms; agree to O(h^2) on smooth
// separated states:
//   u-form: w = -a(u) lap u - a'(u)/2 |grad u|^2 + f(u) - lambda u + eps u_t
//   z-form: w = -2 phi'(u) lap z + f(u) - lambda u + eps u_t,   z = phi(u)
//   v-form: w = -lap v + v + j(v)/2 |grad v|^2 - lambda j(v) + eps u_t,
//           v = f(u)
Field mu_residual_u(const Field& u, const Field& u_t, const ModelParams& p,
                    Potential kind = Potential::raw);
Field mu_residual_z(const Field& u, const Field& z, const Field& u_t, const ModelParams& p);
Field mu_residual_v(const Field& u, const Field& v, const Field& u_t, const ModelParams& p);

}  // namespace model
}  // namespace chdg

#endif

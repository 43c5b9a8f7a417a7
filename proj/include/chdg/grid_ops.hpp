// grid_ops.hpp -- Neumann finite-difference operators, quadrature, and the
// two elliptic solves (shifted Helmholtz, zero-mean Poisson) used by the
// regularization pipeline and the diagnostics.
//
// Conventions: laplacian() is the plain second-difference operator D_h
// (negative semidefinite); the weak no-flux operator of the analysis is
// A_h = -D_h, so solve_shifted_helmholtz solves (I + delta*A_h) z = rhs and
// solve_poisson_zero_mean solves A_h y = rhs on zero-mean data.

#ifndef CHDG_GRID_OPS_HPP
#define CHDG_GRID_OPS_HPP

#include "chdg/grid.hpp"

namespace chdg::grid_ops {

// second-order centered Laplacian with ghost-cell reflection;
// symmetric, annihilates constants, conserves the discrete mean.
Field laplacian(const Field& f);

// cell-centered |grad f|^2: squared face differences averaged to cells,
// zero flux across boundary faces.
Field gradient_sq(const Field& f);

// iterate interior faces; fn(axis, cellL, cellR, inv_h)
template <class Fn>
inline void for_each_face(const Grid& g, Fn&& fn) {
  for (int d = 0; d < g.ndims; ++d) {
    const double inv_h = 1.0 / g.h[d];
    const long stride = (d == 0) ? g.n[1] : 1;
    const int n0 = g.n[0], n1 = g.n[1];
    for (int i = 0; i < n0; ++i)
      for (int j = 0; j < n1; ++j) {
        if (d == 0 && i + 1 >= n0) continue;
        if (d == 1 && j + 1 >= n1) continue;
        const long c = g.index(i, j);
        fn(d, c, c + stride, inv_h);
      }
  }
}

double mean(const Field& f);
double inner(const Field& f, const Field& g);  // cell-volume-weighted
double norm_l2(const Field& f);
double seminorm_h1(const Field& f);  // sqrt(sum over faces of (Df)^2 * vol)

// (I + delta*A_h) z = rhs, A_h = -laplacian; SPD, solved by CG to
// relative tolerance 1e-12 within 10*N iterations.
Field solve_shifted_helmholtz(const Field& rhs, double delta);

// A_h y = rhs on the zero-mean subspace; caller must de-mean the input
// (|mean| <= 1e-10 * ||rhs||). Returns the zero-mean solution.
Field solve_poisson_zero_mean(const Field& rhs);

// ||f||_{V'} = sqrt((A_h^{-1} f, f)); requires zero-mean input.
double norm_vprime_zero_mean(const Field& f);

}  // namespace chdg::grid_ops

#endif

#include "chdg/grid_ops.hpp"

#include <cmath>
#include <string>

#include "chdg/errors.hpp"

namespace chdg::grid_ops {

namespace {

void require_finite(const Field& f, const char* where) {
  const long n = f.size();
  for (long c = 0; c < n; ++c)
    if (!std::isfinite(f.values[c]))
      throw SeparationError(std::string(where) + ": non-finite value at cell " +
                                std::to_string(c),
                            c, f.values[c]);
}

// y = -laplacian(x), writing into pre-sized out
void apply_neg_laplacian(const Grid& g, const std::vector<double>& x, std::vector<double>& out) {
  std::fill(out.begin(), out.end(), 0.0);
  for (int d = 0; d < g.ndims; ++d) {
    const double w = 1.0 / (g.h[d] * g.h[d]);
    const long stride = (d == 0) ? g.n[1] : 1;
    const int n0 = g.n[0], n1 = g.n[1];
    for (int i = 0; i < n0; ++i)
      for (int j = 0; j < n1; ++j) {
        if ((d == 0 && i + 1 >= n0) || (d == 1 && j + 1 >= n1)) continue;
        const long c = g.index(i, j);
        const double diff = x[c + stride] - x[c];
        out[c] -= w * diff;
        out[c + stride] += w * diff;
      }
  }
}

// conjugate gradients for SPD op(x); deterministic fixed-order arithmetic.
// op(x, y): y = op applied to x.
template <class Op>
void cg_solve(const Grid& g, Op&& op, const std::vector<double>& b, std::vector<double>& x,
              double rel_tol, long max_iter, const char* what) {
  const long n = static_cast<long>(b.size());
  std::vector<double> r(n), p(n), ap(n);
  op(x, ap);
  double bnorm2 = 0.0;
  for (long i = 0; i < n; ++i) {
    r[i] = b[i] - ap[i];
    bnorm2 += b[i] * b[i];
  }
  const double stop2 = rel_tol * rel_tol * (bnorm2 > 0 ? bnorm2 : 1.0);
  double rr = 0.0;
  for (long i = 0; i < n; ++i) rr += r[i] * r[i];
  if (rr <= stop2) return;
  p = r;
  for (long it = 0; it < max_iter; ++it) {
    op(p, ap);
    double pap = 0.0;
    for (long i = 0; i < n; ++i) pap += p[i] * ap[i];
    const double alpha = rr / pap;
    for (long i = 0; i < n; ++i) {
      x[i] += alpha * p[i];
      r[i] -= alpha * ap[i];
    }
    double rr_new = 0.0;
    for (long i = 0; i < n; ++i) rr_new += r[i] * r[i];
    if (rr_new <= stop2) return;
    const double beta = rr_new / rr;
    rr = rr_new;
    for (long i = 0; i < n; ++i) p[i] = r[i] + beta * p[i];
  }
  throw SolverError(std::string(what) + ": CG did not converge in " + std::to_string(max_iter) +
                        " iterations (residual " + std::to_string(std::sqrt(rr / (bnorm2 > 0 ? bnorm2 : 1.0))) +
                        " relative)",
                    std::sqrt(rr), static_cast<int>(max_iter));
  (void)g;
}

}  // namespace

Field laplacian(const Field& f) {
  require_finite(f, "laplacian");
  Field out(f.grid);
  apply_neg_laplacian(f.grid, f.values, out.values);
  for (double& v : out.values) v = -v;
  return out;
}

Field gradient_sq(const Field& f) {
  require_finite(f, "gradient_sq");
  Field out(f.grid);
  for_each_face(f.grid, [&](int, long cl, long cr, double inv_h) {
    const double d = (f.values[cr] - f.values[cl]) * inv_h;
    const double half_d2 = 0.5 * d * d;
    out.values[cl] += half_d2;
    out.values[cr] += half_d2;
  });
  return out;
}

double mean(const Field& f) {
  double s = 0.0;
  for (double v : f.values) s += v;
  return s / static_cast<double>(f.size());
}

double inner(const Field& f, const Field& g) {
  require_same_grid(f, g, "inner");
  double s = 0.0;
  const long n = f.size();
  for (long i = 0; i < n; ++i) s += f.values[i] * g.values[i];
  return s * f.grid.cell_volume();
}

double norm_l2(const Field& f) { return std::sqrt(inner(f, f)); }

double seminorm_h1(const Field& f) {
  double s = 0.0;
  for_each_face(f.grid, [&](int, long cl, long cr, double inv_h) {
    const double d = (f.values[cr] - f.values[cl]) * inv_h;
    s += d * d;
  });
  return std::sqrt(s * f.grid.cell_volume());
}

Field solve_shifted_helmholtz(const Field& rhs, double delta) {
  if (!(delta > 0.0)) throw std::invalid_argument("solve_shifted_helmholtz: delta must be > 0");
  require_finite(rhs, "solve_shifted_helmholtz");
  const Grid& g = rhs.grid;
  Field z = rhs;  // constants are fixed points of this initial guess
  std::vector<double> tmp(static_cast<size_t>(g.cells()));
  auto op = [&](const std::vector<double>& x, std::vector<double>& y) {
    apply_neg_laplacian(g, x, y);
    const long n = static_cast<long>(x.size());
    for (long i = 0; i < n; ++i) y[i] = x[i] + delta * y[i];
  };
  cg_solve(g, op, rhs.values, z.values, 1e-12, 10 * g.cells(), "solve_shifted_helmholtz");
  (void)tmp;
  return z;
}

Field solve_poisson_zero_mean(const Field& rhs) {
  require_finite(rhs, "solve_poisson_zero_mean");
  const Grid& g = rhs.grid;
  const double m = mean(rhs);
  const double nr = norm_l2(rhs);
  if (std::abs(m) > 1e-10 * (nr > 0 ? nr : 1.0))
    throw std::invalid_argument("solve_poisson_zero_mean: rhs must have zero mean (got mean " +
                                std::to_string(m) + ")");
  Field b = rhs;
  for (double& v : b.values) v -= m;  // remove the roundoff-level residual mean
  Field y(g);
  auto op = [&](const std::vector<double>& x, std::vector<double>& out) {
    apply_neg_laplacian(g, x, out);
  };
  cg_solve(g, op, b.values, y.values, 1e-12, 10 * g.cells(), "solve_poisson_zero_mean");
  const double my = mean(y);
  for (double& v : y.values) v -= my;
  return y;
}

double norm_vprime_zero_mean(const Field& f) {
  Field y = solve_poisson_zero_mean(f);
  const double v2 = inner(y, f);
  return std::sqrt(v2 > 0.0 ? v2 : 0.0);
}

}  // namespace chdg::grid_ops

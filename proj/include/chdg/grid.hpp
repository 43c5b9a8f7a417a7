// grid.hpp -- uniform cell-centered tensor grid (interval / rectangle) and
// scalar fields living on it. Boundary semantics everywhere in this project
// are homogeneous Neumann realized by ghost-cell reflection.

#ifndef CHDG_GRID_HPP
#define CHDG_GRID_HPP

#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <stdexcept>
#include <vector>

namespace chdg {

struct Grid {
  int ndims = 1;
  std::array<int, 2> n = {0, 1};          // cells per axis; n[1]==1 in 1D
  std::array<double, 2> length = {0, 0};  // physical extent per axis
  std::array<double, 2> h = {0, 0};       // spacing, length/n

  static Grid line(int nx, double lx) {
    Grid g;
    g.ndims = 1;
    g.n = {nx, 1};
    g.length = {lx, 0.0};
    g.validate();
    return g;
  }

  static Grid rect(int nx, int ny, double lx, double ly) {
    Grid g;
    g.ndims = 2;
    g.n = {nx, ny};
    g.length = {lx, ly};
    g.validate();
    return g;
  }

  void validate() {
    if (ndims != 1 && ndims != 2) throw std::invalid_argument("grid: ndims must be 1 or 2");
    for (int d = 0; d < ndims; ++d) {
      if (n[d] < 3) throw std::invalid_argument("grid: need at least 3 cells per axis");
      if (!(length[d] > 0.0)) throw std::invalid_argument("grid: length must be positive");
      h[d] = length[d] / n[d];
    }
    if (ndims == 1) {
      n[1] = 1;
      length[1] = 0.0;
      h[1] = 0.0;
    }
  }

  long cells() const { return static_cast<long>(n[0]) * n[1]; }

  double cell_volume() const { return ndims == 1 ? h[0] : h[0] * h[1]; }

  // linear index: axis 0 slowest (row-major over {n0, n1})
  long index(int i0, int i1 = 0) const { return static_cast<long>(i0) * n[1] + i1; }

  double coord(int axis, int i) const { return (i + 0.5) * h[axis]; }

  bool operator==(const Grid& o) const {
    return ndims == o.ndims && n == o.n && length == o.length;
  }
};

struct Field {
  Grid grid;
  std::vector<double> values;

  Field() = default;
  explicit Field(const Grid& g, double fill = 0.0)
      : grid(g), values(static_cast<size_t>(g.cells()), fill) {}

  static Field constant(const Grid& g, double c) { return Field(g, c); }

  // samples fn(x) in 1D, fn(x, y) in 2D at cell centers
  static Field sample(const Grid& g, const std::function<double(double, double)>& fn) {
    Field f(g);
    for (int i = 0; i < g.n[0]; ++i)
      for (int j = 0; j < g.n[1]; ++j)
        f.values[g.index(i, j)] = fn(g.coord(0, i), g.ndims == 2 ? g.coord(1, j) : 0.0);
    return f;
  }

  double& at(int i0, int i1 = 0) { return values[grid.index(i0, i1)]; }
  double at(int i0, int i1 = 0) const { return values[grid.index(i0, i1)]; }

  long size() const { return grid.cells(); }

  bool all_finite() const {
    for (double v : values)
      if (!std::isfinite(v)) return false;
    return true;
  }

  double min() const {
    double m = values[0];
    for (double v : values) m = std::min(m, v);
    return m;
  }
  double max() const {
    double m = values[0];
    for (double v : values) m = std::max(m, v);
    return m;
  }
  double max_abs() const { return std::max(std::abs(min()), std::abs(max())); }
};

inline void require_same_grid(const Field& a, const Field& b, const char* where) {
  if (!(a.grid == b.grid)) throw std::invalid_argument(std::string(where) + ": grid mismatch");
}

}  // namespace chdg

#endif

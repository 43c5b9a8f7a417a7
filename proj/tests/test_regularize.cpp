#include <doctest.h>

#include <cmath>
#include <random>

#include "chdg/diagnostics.hpp"
#include "chdg/errors.hpp"
#include "chdg/grid_ops.hpp"
#include "chdg/model.hpp"
#include "chdg/regularize.hpp"

using namespace chdg;
namespace reg = chdg::regularize;
namespace ops = chdg::grid_ops;

namespace {

Field tanh_profile(const Grid& g, double scale, double steep) {
  return Field::sample(g, [&](double x, double) {
    return scale * std::tanh(steep * (x - 0.5 * g.length[0]));
  });
}

double l2_diff(const Field& a, const Field& b) {
  Field d = a;
  for (long c = 0; c < d.size(); ++c) d.values[c] -= b.values[c];
  return ops::norm_l2(d);
}

}  // namespace

TEST_SUITE("regularize") {

TEST_CASE("clamp arithmetic") {
  const Grid g = Grid::line(8, 1.0);
  Field u(g);
  u.values[0] = 0.99;
  u.values[1] = 0.0;
  u.values[2] = -0.95;
  Field c = reg::clamp_initial(u, 0.1);
  CHECK(c.values[0] == doctest::Approx(0.7).epsilon(1e-15));  // 1 - 3*0.1
  CHECK(c.values[1] == 0.0);
  CHECK(c.values[2] == doctest::Approx(-0.7).epsilon(1e-15));
  CHECK_THROWS(reg::clamp_initial(u, 0.3));  // delta outside (0, 1/6)
}

TEST_CASE("clamp never increases the convex part of the energy") {
  // the lambda-free statement is the provable one: clamping lowers F
  // pointwise, shrinks every face difference, and lowers a(u)
  std::mt19937_64 rng(19);
  std::uniform_real_distribution<double> unif(-0.9999, 0.9999);
  const Grid g = Grid::line(64, 1.0);
  ModelParams p;  // lambda = 0
  for (int t = 0; t < 25; ++t) {
    Field u(g);
    for (double& v : u.values) v = unif(rng);
    const double d = 0.01 + 0.005 * (t % 10);
    Field c = reg::clamp_initial(u, d);
    CHECK(diagnostics::energy(c, p) <= diagnostics::energy(u, p) + 1e-12);
  }
}

TEST_CASE("pipeline: constants are fixed points") {
  const Grid g = Grid::line(32, 2.0);
  for (double m : {0.0, 0.4, -0.69}) {
    Field u0d = reg::regularize_initial(Field::constant(g, m), 0.1);
    for (double v : u0d.values) CHECK(v == doctest::Approx(m).epsilon(5e-16));
  }
}

TEST_CASE("pipeline bounds hold for random data and every delta") {
  std::mt19937_64 rng(29);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const Grid g = Grid::line(96, 1.0);
  for (int t = 0; t < 40; ++t) {
    Field u(g);
    for (double& v : u.values) v = unif(rng);
    const double d = std::pow(2.0, -3.0 - (t % 5));
    Field ud = reg::regularize_initial(u, d);
    const auto rep = reg::maximum_principle_check(u, ud, d);
    CHECK(rep.ok);
    CHECK(rep.lower_margin >= 0.0);
    CHECK(rep.upper_margin >= 0.0);
  }
}

TEST_CASE("pipeline bounds on several grids at delta=0.05") {
  for (int n : {64, 256, 1024}) {
    const Grid g = Grid::line(n, 1.0);
    Field u = Field::sample(g, [](double x, double) {
      return 0.999 * std::sin(40.0 * x) * std::cos(3.0 * x);
    });
    Field ud = reg::regularize_initial(u, 0.05);
    CHECK(reg::maximum_principle_check(u, ud, 0.05).ok);
  }
}

TEST_CASE("helmholtz stage contracts the z-level H1 seminorm") {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> unif(-1.0, 1.0);
  const Grid g = Grid::line(64, 1.0);
  for (int t = 0; t < 100; ++t) {
    Field u(g);
    for (double& v : u.values) v = unif(rng);
    const double d = 0.02 + 0.001 * t;
    Field z1 = reg::clamp_initial(u, d);
    for (double& v : z1.values) v = model::phi(v);
    Field z = ops::solve_shifted_helmholtz(z1, d);
    CHECK(ops::seminorm_h1(z) <= ops::seminorm_h1(z1) * (1.0 + 1e-10));
  }
}

TEST_CASE("tanh battery: L2 distance decreases with delta, energy ratio bounded") {
  const Grid g = Grid::line(256, 1.0);
  Field u0 = tanh_profile(g, 0.999, 10.0);
  ModelParams p0;
  const double e0 = diagnostics::energy(u0, p0);
  double prev = -1.0;
  for (int k = 3; k <= 7; ++k) {
    const double d = std::pow(2.0, -k);
    Field ud = reg::regularize_initial(u0, d);
    const double l2 = l2_diff(ud, u0);
    if (prev >= 0.0) CHECK(l2 < prev);
    prev = l2;
    const double ratio = diagnostics::energy(ud, p0) / (1.0 + e0);
    CHECK(ratio <= 50.0);
    CHECK(std::isfinite(ratio));
  }
}

TEST_CASE("pipeline is near-identity on smooth separated data") {
  const Grid g = Grid::line(128, 1.0);
  for (double d : {0.125, 0.0625, 0.03125}) {
    Field u = Field::sample(g, [&](double x, double) {
      return (1.0 - 3.0 * d - 0.05) * std::cos(M_PI * x);
    });
    const double dist = l2_diff(reg::regularize_initial(u, d), u);
    CHECK(dist <= 12.0 * d);  // ||regularize(u) - u|| <= C*delta, rate measured
  }
}

TEST_CASE("max principle report carries margins and mean drift") {
  const Grid g = Grid::line(32, 1.0);
  const double d = 0.05;
  Field u = Field::constant(g, 0.3);
  Field ud = reg::regularize_initial(u, d);
  const auto rep = reg::maximum_principle_check(u, ud, d);
  CHECK(rep.upper_margin == doctest::Approx(1.0 - 3.0 * d - 0.3).epsilon(1e-12));
  CHECK(rep.lower_margin == doctest::Approx(1.0 - 3.0 * d + 0.3).epsilon(1e-12));
  CHECK(std::abs(rep.mean_after - rep.mean_before) < 1e-12);

  Field bad = Field::constant(g, 0.3);
  bad.values[5] = 0.99;
  CHECK_THROWS_AS(reg::maximum_principle_check(u, bad, d), SeparationError);
}

TEST_CASE("delta sweep margin approaches the clamp distance") {
  // as delta -> 0 the pipeline converges to the identity on fixed data,
  // so the margin approaches the distance of max|u| from 1 - 3*delta
  const Grid g = Grid::line(128, 1.0);
  Field u = Field::sample(g, [](double x, double) { return 0.8 * std::cos(M_PI * x); });
  // the helmholtz stage damps the mode by 1/(1 + d*mu), so the gap to the
  // limiting margin closes at rate O(d)
  double prev_gap = 1e9;
  for (int k = 3; k <= 7; ++k) {
    const double d = std::pow(2.0, -k);
    const auto rep = reg::maximum_principle_check(u, reg::regularize_initial(u, d), d);
    const double want = 1.0 - 3.0 * d - 0.8;
    const double gap = std::abs(rep.upper_margin - want);
    CHECK(gap < prev_gap + 1e-12);
    CHECK(gap <= 10.0 * d);
    prev_gap = gap;
  }
}

}  // TEST_SUITE

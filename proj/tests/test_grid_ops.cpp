#include <doctest.h>

#include <cmath>
#include <random>

#include "chdg/errors.hpp"
#include "chdg/grid_ops.hpp"

using namespace chdg;
namespace ops = chdg::grid_ops;

namespace {

Field random_field(const Grid& g, std::mt19937_64& rng, double lo = -1.0, double hi = 1.0) {
  std::uniform_real_distribution<double> unif(lo, hi);
  Field f(g);
  for (double& v : f.values) v = unif(rng);
  return f;
}

// discrete eigenvalue of -laplacian for mode cos(k pi x / L) on n cells
double mode_eigenvalue(int k, int n, double L) {
  const double h = L / n;
  const double s = std::sin(0.5 * k * M_PI * h / L);
  return 4.0 / (h * h) * s * s;
}

}  // namespace

TEST_SUITE("grid_ops") {

TEST_CASE("laplacian annihilates constants") {
  const Grid g = Grid::line(64, 1.0);
  Field lap = ops::laplacian(Field::constant(g, 3.7));
  for (double v : lap.values) CHECK(v == 0.0);
  const Grid g2 = Grid::rect(16, 12, 1.0, 2.0);
  Field lap2 = ops::laplacian(Field::constant(g2, -0.4));
  for (double v : lap2.values) CHECK(v == 0.0);
}

TEST_CASE("laplacian of cos mode: second order accurate") {
  const double L = 1.0;
  double prev_err = 0.0;
  for (int n : {128, 256, 512}) {
    const Grid g = Grid::line(n, L);
    Field f = Field::sample(g, [&](double x, double) { return std::cos(M_PI * x / L); });
    Field lap = ops::laplacian(f);
    double err = 0.0;
    for (int i = 0; i < n; ++i) {
      const double want = -(M_PI / L) * (M_PI / L) * std::cos(M_PI * g.coord(0, i) / L);
      err = std::max(err, std::abs(lap.values[i] - want));
    }
    if (n == 256) CHECK(err < 1e-3);
    if (prev_err > 0.0) {
      const double rate = prev_err / err;
      CHECK(rate > 3.6);
      CHECK(rate < 4.4);
    }
    prev_err = err;
  }
}

TEST_CASE("laplacian symmetry and kernel") {
  std::mt19937_64 rng(5);
  const Grid g = Grid::line(48, 2.0);
  for (int t = 0; t < 20; ++t) {
    Field f = random_field(g, rng), h = random_field(g, rng);
    const double lhs = ops::inner(ops::laplacian(f), h);
    const double rhs = ops::inner(f, ops::laplacian(h));
    CHECK(std::abs(lhs - rhs) <= 1e-12 * std::max(1.0, std::abs(lhs)));
    // negative semidefinite
    CHECK(ops::inner(ops::laplacian(f), f) <= 1e-12);
  }
  // 2D symmetry
  const Grid g2 = Grid::rect(12, 10, 1.0, 1.5);
  Field f2 = random_field(g2, rng), h2 = random_field(g2, rng);
  CHECK(ops::inner(ops::laplacian(f2), h2) ==
        doctest::Approx(ops::inner(f2, ops::laplacian(h2))).epsilon(1e-12));
}

TEST_CASE("laplacian conserves the discrete mean") {
  std::mt19937_64 rng(17);
  const Grid g = Grid::line(200, 3.0);
  Field f = random_field(g, rng);
  CHECK(std::abs(ops::mean(ops::laplacian(f))) < 1e-10);
}

TEST_CASE("laplacian rejects non-finite input") {
  const Grid g = Grid::line(8, 1.0);
  Field f(g);
  f.values[3] = std::nan("");
  CHECK_THROWS_AS(ops::laplacian(f), SeparationError);
}

TEST_CASE("gradient_sq basics") {
  const Grid g = Grid::line(64, 1.0);
  Field c = ops::gradient_sq(Field::constant(g, 2.0));
  for (double v : c.values) CHECK(v == 0.0);

  // f(x) = x has |grad|^2 = 1 on interior cells
  Field lin = Field::sample(g, [](double x, double) { return x; });
  Field gs = ops::gradient_sq(lin);
  for (int i = 1; i + 1 < 64; ++i) CHECK(gs.values[i] == doctest::Approx(1.0).epsilon(1e-12));

  // integral of |grad cos(pi x)|^2 over [0,1] = pi^2/2 + O(h^2)
  const Grid g2 = Grid::line(256, 1.0);
  Field f = Field::sample(g2, [](double x, double) { return std::cos(M_PI * x); });
  Field gs2 = ops::gradient_sq(f);
  double total = 0.0;
  for (double v : gs2.values) total += v;
  total *= g2.cell_volume();
  CHECK(total == doctest::Approx(M_PI * M_PI / 2.0).epsilon(2e-4));
}

TEST_CASE("shifted helmholtz: constants, discrete eigenvalue, contraction") {
  const Grid g = Grid::line(128, 1.0);
  Field c = ops::solve_shifted_helmholtz(Field::constant(g, 4.2), 0.1);
  for (double v : c.values) CHECK(v == doctest::Approx(4.2).epsilon(1e-14));

  // cos mode: z = rhs / (1 + delta*mu) with the discrete eigenvalue mu,
  // matching cos(pi x)/1.98696 to O(h^2)
  Field rhs = Field::sample(g, [](double x, double) { return std::cos(M_PI * x); });
  Field z = ops::solve_shifted_helmholtz(rhs, 0.1);
  const double mu = mode_eigenvalue(1, 128, 1.0);
  double err_disc = 0.0;
  for (long i = 0; i < z.size(); ++i)
    err_disc = std::max(err_disc, std::abs(z.values[i] - rhs.values[i] / (1.0 + 0.1 * mu)));
  CHECK(err_disc < 1e-11);
  const double cont = 1.0 / (1.0 + 0.1 * M_PI * M_PI);  // 1/1.98696
  for (long i = 0; i < z.size(); ++i)
    CHECK(z.values[i] == doctest::Approx(rhs.values[i] * cont).epsilon(2e-4));

  // H1-seminorm contraction on random fields
  std::mt19937_64 rng(23);
  for (int t = 0; t < 100; ++t) {
    Field r = random_field(g, rng, -2.0, 2.0);
    Field zz = ops::solve_shifted_helmholtz(r, 0.02 + 0.01 * (t % 10));
    CHECK(ops::seminorm_h1(zz) <= ops::seminorm_h1(r) * (1.0 + 1e-10));
  }
}

TEST_CASE("poisson zero-mean: roundtrip, eigenvalue, zero rhs, rejection") {
  const Grid g = Grid::line(96, 1.0);
  std::mt19937_64 rng(31);
  Field f = random_field(g, rng);
  const double mf = ops::mean(f);
  for (double& v : f.values) v -= mf;
  Field rhs = ops::laplacian(f);
  for (double& v : rhs.values) v = -v;  // A_h f
  Field back = ops::solve_poisson_zero_mean(rhs);
  for (long i = 0; i < back.size(); ++i)
    CHECK(back.values[i] == doctest::Approx(f.values[i]).epsilon(1e-10));

  // A_h y = cos(pi x)  =>  y = cos(pi x)/mu -> cos(pi x)/pi^2
  Field c = Field::sample(g, [](double x, double) { return std::cos(M_PI * x); });
  Field y = ops::solve_poisson_zero_mean(c);
  for (long i = 0; i < y.size(); ++i)
    CHECK(y.values[i] == doctest::Approx(c.values[i] / (M_PI * M_PI)).epsilon(3e-4));

  Field zero = ops::solve_poisson_zero_mean(Field(g));
  for (double v : zero.values) CHECK(v == 0.0);

  CHECK_THROWS_AS(ops::solve_poisson_zero_mean(Field::constant(g, 1.0)), std::invalid_argument);
}

TEST_CASE("means, norms, V' norm") {
  const Grid g = Grid::line(80, 1.0);
  CHECK(ops::mean(Field::constant(g, 2.5)) == doctest::Approx(2.5).epsilon(1e-15));
  CHECK(ops::norm_l2(Field::constant(g, 1.0)) == doctest::Approx(1.0).epsilon(1e-14));

  // ||cos(pi x)||_{V'} = sqrt(1/(2 pi^2)) + O(h^2)
  Field c = Field::sample(g, [](double x, double) { return std::cos(M_PI * x); });
  CHECK(ops::norm_vprime_zero_mean(c) ==
        doctest::Approx(std::sqrt(0.5) / M_PI).epsilon(1e-3));
  CHECK_THROWS_AS(ops::norm_vprime_zero_mean(Field::constant(g, 0.3)), std::invalid_argument);
}

TEST_CASE("2D laplacian of separable mode") {
  const Grid g = Grid::rect(64, 64, 1.0, 1.0);
  Field f = Field::sample(g, [](double x, double y) { return std::cos(M_PI * x) * std::cos(M_PI * y); });
  Field lap = ops::laplacian(f);
  double err = 0.0;
  for (int i = 0; i < 64; ++i)
    for (int j = 0; j < 64; ++j) {
      const double want = -2.0 * M_PI * M_PI * f.at(i, j);
      err = std::max(err, std::abs(lap.at(i, j) - want));
    }
  CHECK(err < 2.0 * M_PI * M_PI * M_PI * M_PI / (64.0 * 64.0));  // ~ C h^2
}

TEST_CASE("grid validation") {
  CHECK_THROWS(Grid::line(2, 1.0));
  CHECK_THROWS(Grid::line(8, -1.0));
  CHECK_THROWS(Grid::rect(8, 2, 1.0, 1.0));
}

}  // TEST_SUITE

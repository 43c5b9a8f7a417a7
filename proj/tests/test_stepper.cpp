#include <doctest.h>

#include <cmath>
#include <random>
#include <vector>

#include "chdg/diagnostics.hpp"
#include "chdg/errors.hpp"
#include "chdg/grid_ops.hpp"
#include "chdg/stepper.hpp"

using namespace chdg;
namespace ops = chdg::grid_ops;
namespace st = chdg::stepper;

namespace {

Field random_separated(const Grid& g, std::mt19937_64& rng, double bound) {
  std::uniform_real_distribution<double> unif(-bound, bound);
  Field f(g);
  for (double& v : f.values) v = unif(rng);
  return f;
}

}  // namespace

TEST_SUITE("stepper") {

TEST_CASE("mu_variational is the gradient of the discrete energy") {
  // finite-difference check of the variational derivative, lambda = 0
  const Grid g = Grid::line(24, 1.0);
  ModelParams p;
  Field u = Field::sample(g, [](double x, double) { return 0.1 + 0.3 * std::cos(M_PI * x); });
  Field mu = st::mu_variational(u, p, Potential::raw);
  const double vol = g.cell_volume();
  for (int i = 0; i < 24; i += 3) {
    const double e = 1e-7;
    Field up = u, um = u;
    up.values[i] += e;
    um.values[i] -= e;
    const double fd =
        (diagnostics::energy(up, p) - diagnostics::energy(um, p)) / (2.0 * e * vol);
    CHECK(mu.values[i] == doctest::Approx(fd).epsilon(1e-5));
  }
}

TEST_CASE("homogeneous state is a fixed point, exactly") {
  const Grid g = Grid::line(48, 2.0);
  ModelParams p;
  p.lambda = 1.5;
  p.delta = 0.05;
  StepperConfig cfg;
  cfg.dt = 0.5;  // any dt
  const double m = 0.3;
  SimState s = st::init_state(Field::constant(g, m), p, cfg);
  CHECK(s.w.values[0] == model::f_delta(m, p) - p.lambda * m);
  SimState s1 = st::step(s, p, cfg);
  for (long c = 0; c < g.cells(); ++c) {
    CHECK(s1.u.values[c] == m);
    CHECK(s1.w.values[c] == model::f_delta(m, p) - p.lambda * m);
  }
}

TEST_CASE("exact root converges in zero iterations") {
  const Grid g = Grid::line(32, 1.0);
  ModelParams p;
  StepperConfig cfg;
  cfg.dt = 1e-3;
  SimState s = st::init_state(Field::constant(g, 0.2), p, cfg);
  auto nr = st::newton_solve(s, p, cfg, cfg.dt, s.u, s.w);
  CHECK(nr.report.converged);
  CHECK(nr.report.iterations <= 1);
}

TEST_CASE("newton converges quadratically from an offset guess") {
  const Grid g = Grid::line(32, 1.0);
  ModelParams p;
  p.lambda = 1.0;
  StepperConfig cfg;
  cfg.dt = 1e-3;
  cfg.newton_tol = 1e-13;
  const double m = 0.1;
  SimState s = st::init_state(Field::constant(g, m), p, cfg);
  Field guess_u = Field::constant(g, m + 0.3);
  auto nr = st::newton_solve(s, p, cfg, cfg.dt, guess_u, s.w);
  CHECK(nr.report.converged);
  // log-residual slopes log(r_{k+2}/r_{k+1}) / log(r_{k+1}/r_k) should reach
  // >= 1.8 (a residual crashing through the precision floor only raises them)
  const auto& res = nr.report.residuals;
  REQUIRE(res.size() >= 3);
  double best_slope = 0.0;
  for (size_t k = 0; k + 2 < res.size(); ++k) {
    if (res[k + 1] >= res[k] || res[k + 2] <= 0.0) continue;
    const double slope = std::log(res[k + 2] / res[k + 1]) / std::log(res[k + 1] / res[k]);
    best_slope = std::max(best_slope, slope);
  }
  CHECK(best_slope >= 1.8);
}

TEST_CASE("guess violating separation is clipped, then converges") {
  const Grid g = Grid::line(32, 1.0);
  ModelParams p;
  p.delta = 0.05;
  StepperConfig cfg;
  cfg.dt = 1e-4;
  SimState s = st::init_state(Field::constant(g, 0.2), p, cfg);
  Field guess_u = Field::constant(g, 0.9999);  // outside the safe interval
  auto nr = st::newton_solve(s, p, cfg, cfg.dt, guess_u, s.w);
  CHECK(nr.report.converged);
  CHECK(nr.u.max_abs() < 1.0 - p.delta);
}

TEST_CASE("mass conservation over 1000 steps") {
  const Grid g = Grid::line(128, 4.0);
  ModelParams p;
  p.lambda = 3.0;
  p.delta = 1.0 / 32.0;
  StepperConfig cfg;
  cfg.dt = 2e-3;
  std::mt19937_64 rng(41);
  Field u0 = random_separated(g, rng, 0.3);
  for (double& v : u0.values) v += 0.1;
  SimState s = st::init_state(u0, p, cfg);
  const double m0 = ops::mean(s.u);
  for (int k = 0; k < 1000; ++k) s = st::step(s, p, cfg);
  CHECK(std::abs(ops::mean(s.u) - m0) <= 1e-11);
}

TEST_CASE("convex splitting dissipates energy at every step") {
  const Grid g = Grid::line(96, 2.0);
  ModelParams p;
  p.lambda = 3.0;
  p.delta = 1.0 / 32.0;
  StepperConfig cfg;
  cfg.dt = 5e-3;
  std::mt19937_64 rng(43);
  Field u0 = random_separated(g, rng, 0.8);  // rough separated data
  SimState s = st::init_state(u0, p, cfg);
  double e = diagnostics::energy(s.u, p);
  for (int k = 0; k < 100; ++k) {
    s = st::step(s, p, cfg);
    const double en = diagnostics::energy(s.u, p);
    CHECK(en <= e + 1e-9 * (1.0 + std::abs(e)));
    e = en;
  }
}

TEST_CASE("dissipation residual is nonpositive and first order in dt") {
  const Grid g = Grid::line(64, 2.0);
  ModelParams p;
  p.lambda = 1.0;
  Field u0 = Field::sample(g, [](double x, double) { return 0.1 + 0.4 * std::cos(M_PI * x / 2.0); });
  const double T = 0.02;
  double sums[2];
  int idx = 0;
  for (double dt : {1e-3, 5e-4}) {
    StepperConfig cfg;
    cfg.dt = dt;
    SimState s = st::init_state(u0, p, cfg);
    double acc = 0.0;
    while (s.t < T - 1e-12) {
      SimState n = st::step(s, p, cfg);
      const double r = diagnostics::dissipation_residual(s.u, n.u, n.w, p, dt);
      CHECK(r <= 1e-9 * (1.0 + std::abs(diagnostics::energy(s.u, p))));
      acc += std::abs(r);
      s = n;
    }
    sums[idx++] = acc;
  }
  const double ratio = sums[0] / sums[1];
  CHECK(ratio > 1.6);
  CHECK(ratio < 2.4);
}

TEST_CASE("viscous and inviscid runs agree to 1e-5 for eps = 1e-8") {
  const Grid g = Grid::line(48, 2.0);
  Field u0 = Field::sample(g, [](double x, double) { return 0.2 + 0.3 * std::cos(M_PI * x / 2.0); });
  StepperConfig cfg;
  cfg.dt = 1e-3;
  Field answers[2];
  int idx = 0;
  for (double eps : {0.0, 1e-8}) {
    ModelParams p;
    p.lambda = 1.0;
    p.epsilon = eps;
    SimState s = st::run(u0, p, cfg, 0.05);
    answers[idx++] = s.u;
  }
  Field d = answers[0];
  for (long c = 0; c < d.size(); ++c) d.values[c] -= answers[1].values[c];
  CHECK(ops::norm_l2(d) <= 1e-5);
}

TEST_CASE("truncated and raw runs are bit-identical on separated trajectories") {
  const Grid g = Grid::line(64, 2.0);
  ModelParams p;
  p.lambda = 1.0;
  p.delta = 0.1;
  Field u0 = Field::sample(g, [](double x, double) { return 0.1 + 0.3 * std::cos(M_PI * x) ; });
  SimState fin[2];
  int idx = 0;
  for (Potential kind : {Potential::truncated, Potential::raw}) {
    StepperConfig cfg;
    cfg.dt = 1e-3;
    cfg.potential = kind;
    fin[idx++] = st::run(u0, p, cfg, 0.03);
  }
  REQUIRE(fin[0].step_index == fin[1].step_index);
  for (long c = 0; c < fin[0].u.size(); ++c) {
    CHECK(fin[0].u.values[c] == fin[1].u.values[c]);
    CHECK(fin[0].w.values[c] == fin[1].w.values[c]);
  }
}

TEST_CASE("run: t_end = 0 emits exactly one record and returns the initial state") {
  const Grid g = Grid::line(16, 1.0);
  ModelParams p;
  StepperConfig cfg;
  cfg.dt = 1e-3;
  int records = 0;
  SimState s = st::run(Field::constant(g, 0.25), p, cfg, 0.0,
                       [&](const diagnostics::Record&) { ++records; });
  CHECK(records == 1);
  CHECK(s.t == 0.0);
  CHECK(s.step_index == 0);
  for (double v : s.u.values) CHECK(v == 0.25);
}

TEST_CASE("run: stable homogeneous state stays put") {
  // lambda < a(m): every mode decays, ||u - m|| stays at solver level
  const Grid g = Grid::line(64, 1.0);
  ModelParams p;
  p.lambda = 1.0;
  StepperConfig cfg;
  cfg.dt = 1e-3;
  const double m = 0.1;
  SimState s = st::run(Field::constant(g, m), p, cfg, 0.05);
  Field d = s.u;
  for (double& v : d.values) v -= m;
  CHECK(ops::norm_l2(d) <= 1e-10);
}

TEST_CASE("run: 2D smoke test conserves mass and dissipates energy") {
  const Grid g = Grid::rect(16, 16, 1.0, 1.0);
  ModelParams p;
  p.lambda = 3.0;
  StepperConfig cfg;
  cfg.dt = 1e-3;
  Field u0 = Field::sample(g, [](double x, double y) {
    return 0.2 * std::cos(M_PI * x) * std::cos(M_PI * y) + 0.1 * std::cos(2.0 * M_PI * x);
  });
  std::vector<double> energies;
  SimState s = st::run(u0, p, cfg, 0.01, [&](const diagnostics::Record& r) {
    energies.push_back(r.energy);
  });
  CHECK(std::abs(ops::mean(s.u) - ops::mean(u0)) <= 1e-12);
  for (size_t i = 1; i < energies.size(); ++i)
    CHECK(energies[i] <= energies[i - 1] + 1e-9 * (1.0 + std::abs(energies[i - 1])));
}

TEST_CASE("config validation") {
  ModelParams p;
  StepperConfig cfg;
  cfg.newton_tol = 1e-3;  // above the 1e-6 cap
  CHECK_THROWS_AS(cfg.validate(p), std::invalid_argument);
  cfg = StepperConfig{};
  cfg.clip_margin = p.delta;  // must be < delta
  CHECK_THROWS_AS(cfg.validate(p), std::invalid_argument);
  cfg = StepperConfig{};
  cfg.validate(p);
  CHECK(cfg.effective_clip_margin(p) == 0.5 * p.delta);
  const Grid g = Grid::line(32, M_PI);
  CHECK(cfg.effective_dt(g) == doctest::Approx(1e-4 / 2.0));
}

}  // TEST_SUITE

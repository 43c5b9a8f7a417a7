#include "chdg/runner.hpp"

#include <atomic>
#include <charconv>
#include <cmath>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <random>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "chdg/diagnostics.hpp"
#include "chdg/errors.hpp"
#include "chdg/grid_ops.hpp"
#include "chdg/regularize.hpp"
#include "chdg/snapshot.hpp"
#include "chdg/verification.hpp"

namespace chdg {

namespace fs = std::filesystem;
using ordered_json = nlohmann::ordered_json;

std::string format_double(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

Field build_initial(const RunConfig& cfg) {
  if (cfg.ic.type == IcSpec::Type::file) {
    Snapshot s = read_snapshot(cfg.ic.path);
    if (!(s.field.grid == cfg.make_grid()))
      throw ConfigError("ic file grid does not match the configured grid");
    return s.field;
  }
  const Grid g = cfg.make_grid();
  Field u(g);
  switch (cfg.ic.type) {
    case IcSpec::Type::constant:
      u = Field::constant(g, cfg.ic.m);
      break;
    case IcSpec::Type::cosine:
      u = Field::sample(g, [&](double x, double y) {
        double mode = std::cos(cfg.ic.mode * M_PI * x / g.length[0]);
        if (g.ndims == 2) mode *= std::cos(cfg.ic.mode * M_PI * y / g.length[1]);
        return cfg.ic.m + cfg.ic.amplitude * mode;
      });
      break;
    case IcSpec::Type::tanh_front:
      u = Field::sample(g, [&](double x, double) {
        return cfg.ic.m + cfg.ic.amplitude * std::tanh(cfg.ic.steepness * (x - 0.5 * g.length[0]));
      });
      break;
    case IcSpec::Type::file:
      break;  // handled above
  }
  if (cfg.ic.perturbation > 0.0) {
    // grid-independent low-mode perturbation: fixed seeded coefficients on
    // the first perturb_modes cosine modes per axis, zero discrete mean
    std::mt19937_64 rng(cfg.seed);
    std::uniform_real_distribution<double> unif(-1.0, 1.0);
    const int K = cfg.ic.perturb_modes;
    std::vector<double> cx(K), cy(K);
    for (int k = 0; k < K; ++k) cx[k] = unif(rng);
    for (int k = 0; k < K; ++k) cy[k] = unif(rng);
    const double scale = cfg.ic.perturbation / K;
    for (int i = 0; i < g.n[0]; ++i)
      for (int jj = 0; jj < g.n[1]; ++jj) {
        const double x = g.coord(0, i);
        double s = 0.0;
        for (int k = 1; k <= K; ++k) {
          double mode = std::cos(k * M_PI * x / g.length[0]);
          if (g.ndims == 2) {
            const double y = g.coord(1, jj);
            mode += cy[k - 1] * std::cos(k * M_PI * y / g.length[1]);
          }
          s += cx[k - 1] * mode;
        }
        u.values[g.index(i, jj)] += scale * s;
      }
  }
  // keep the datum admissible after perturbation
  for (double& v : u.values) v = std::clamp(v, -1.0, 1.0);
  return u;
}

namespace {

const char* kCsvHeader =
    "t,mass,energy,J,dissipation_residual,min_u,max_u,separation_gap,"
    "entropy_m_grad,entropy_m_lap,entropy_quartic\n";

void append_csv_row(std::ostream& o, const diagnostics::Record& r) {
  o << format_double(r.t) << ',' << format_double(r.mass) << ',' << format_double(r.energy) << ','
    << format_double(r.gradient_energy) << ',' << format_double(r.dissipation_residual) << ','
    << format_double(r.min_u) << ',' << format_double(r.max_u) << ','
    << format_double(r.separation_gap) << ',' << format_double(r.entropy_m_grad) << ','
    << format_double(r.entropy_m_lap) << ',' << format_double(r.entropy_quartic) << '\n';
}

std::string snapshot_name(long step) {
  std::ostringstream o;
  o << "u_" << std::setw(8) << std::setfill('0') << step << ".chdg";
  return o.str();
}

void write_failure_marker(const fs::path& dir, const std::string& msg) {
  std::ofstream f(dir / "FAILED");
  f << msg << "\n";
}

}  // namespace

int run_simulation(const RunConfig& cfg, bool strict) {
  cfg.validate();
  const fs::path out(cfg.out_dir);
  fs::create_directories(out);

  ordered_json manifest;
  manifest["format"] = "chdg-run";
  manifest["version"] = 1;
  {
    ordered_json jc;
    std::istringstream cfgtext(render_config(cfg));
    std::string line;
    while (std::getline(cfgtext, line)) {
      const auto eq = line.find(" = ");
      jc[line.substr(0, eq)] = line.substr(eq + 3);
    }
    manifest["config"] = jc;
  }
  std::vector<std::string> outputs;

  try {
    Field u0 = build_initial(cfg);
    Field u0d = regularize::regularize_initial(u0, cfg.model.delta);
    const auto rep = regularize::maximum_principle_check(u0, u0d, cfg.model.delta);
    manifest["regularization"] = {{"min_u", rep.min_u},
                                  {"max_u", rep.max_u},
                                  {"mean_before", rep.mean_before},
                                  {"mean_after", rep.mean_after},
                                  {"mean_drift", rep.mean_after - rep.mean_before}};

    std::ofstream csv(out / "diagnostics.csv", std::ios::trunc);
    csv << kCsvHeader;
    outputs.push_back("diagnostics.csv");

    write_snapshot(out / snapshot_name(0), u0d, 0.0);
    outputs.push_back(snapshot_name(0));

    const double mass0 = grid_ops::mean(u0d);
    double mass_drift = 0.0;
    double e_prev = 0.0;
    bool have_e_prev = false;
    long energy_violations = 0;
    double min_gap = 1.0;
    long emitted = 0;

    auto sink = [&](const diagnostics::Record& r) {
      append_csv_row(csv, r);
      ++emitted;
      mass_drift = std::max(mass_drift, std::abs(r.mass - mass0));
      min_gap = std::min(min_gap, r.separation_gap);
      if (have_e_prev && cfg.stepper.scheme == Scheme::convex_splitting &&
          r.energy > e_prev + 1e-9 * (1.0 + std::abs(e_prev)))
        ++energy_violations;
      e_prev = r.energy;
      have_e_prev = true;
    };
    long last_snap = 0;
    auto snapper = [&](const SimState& s) {
      if (cfg.snapshot_stride > 0 && s.step_index > 0 &&
          s.step_index % cfg.snapshot_stride == 0) {
        write_snapshot(out / snapshot_name(s.step_index), s.u, s.t);
        outputs.push_back(snapshot_name(s.step_index));
        last_snap = s.step_index;
      }
    };

    stepper::RunStats stats;
    SimState final_state = stepper::run(u0d, cfg.model, cfg.stepper, cfg.t_end, sink, cfg.stride,
                                        snapper, &stats);

    if (final_state.step_index != last_snap) {
      write_snapshot(out / snapshot_name(final_state.step_index), final_state.u, final_state.t);
      if (final_state.step_index != 0) outputs.push_back(snapshot_name(final_state.step_index));
    }

    const bool mass_ok = mass_drift <= 1e-11;
    const bool energy_ok = energy_violations == 0;
    const bool gap_ok = min_gap > 0.0;
    const bool strict_ok = !strict || stats.dt_halvings == 0;
    manifest["result"] = {{"steps", final_state.step_index},
                          {"t_final", final_state.t},
                          {"records", emitted},
                          {"dt_halvings", stats.dt_halvings},
                          {"mass_drift", mass_drift},
                          {"energy_violations", energy_violations},
                          {"min_separation_gap", min_gap},
                          {"mass_ok", mass_ok},
                          {"energy_ok", energy_ok},
                          {"separation_ok", gap_ok}};
    manifest["outputs"] = outputs;
    const bool ok = mass_ok && energy_ok && gap_ok && strict_ok;
    manifest["status"] = ok ? "ok" : "monitor_failure";
    std::ofstream mj(out / "run.json", std::ios::trunc);
    mj << manifest.dump(2) << "\n";
    if (!ok) write_failure_marker(out, strict_ok ? "invariant monitor failed"
                                                 : "strict mode: dt halvings occurred");
    return ok ? 0 : 1;
  } catch (const std::exception& e) {
    manifest["status"] = "error";
    manifest["error"] = e.what();
    manifest["outputs"] = outputs;
    std::ofstream mj(out / "run.json", std::ios::trunc);
    mj << manifest.dump(2) << "\n";
    write_failure_marker(out, e.what());
    return 1;
  }
}

namespace {

ordered_json report_json(const verification::OracleReport& r) {
  ordered_json j;
  j["name"] = r.name;
  j["inputs"] = r.inputs;
  j["measured"] = r.measured;
  j["reference"] = r.reference;
  j["tolerance"] = r.tolerance;
  j["pass"] = r.pass;
  for (const auto& [k, v] : r.extra) j["extra"][k] = v;
  return j;
}

void print_report(std::ostream& log, const verification::OracleReport& r) {
  log << (r.pass ? "PASS " : "FAIL ") << r.name << "  measured=" << format_double(r.measured)
      << " reference=" << format_double(r.reference) << " tol=" << format_double(r.tolerance)
      << "\n";
}

std::vector<verification::OracleReport> suite_identities() {
  std::vector<verification::OracleReport> out;
  // finite-difference derivative chains and closed-form identities
  auto mk = [&](const std::string& name, double measured, double reference, double tol) {
    verification::OracleReport r;
    r.name = name;
    r.measured = measured;
    r.reference = reference;
    r.tolerance = tol;
    r.pass = std::abs(measured - reference) <= tol;
    out.push_back(r);
  };
  std::mt19937_64 rng(7);
  std::uniform_real_distribution<double> unif(-0.99, 0.99);
  double worst_fa = 0.0, worst_co21 = 0.0, worst_phi = 0.0, worst_jf = 0.0;
  const double h = 3e-6;
  for (int i = 0; i < 1000; ++i) {
    const double r = unif(rng);
    const double fd = (model::f(r + h) - model::f(r - h)) / (2 * h);
    worst_fa = std::max(worst_fa, std::abs(fd - model::a(r)) / model::a(r));
    const double co21 = model::a(r) - 2.0 * model::a_prime(r) * model::a_prime(r) / model::a_second(r);
    worst_co21 = std::max(worst_co21, std::abs(co21 - 2.0 / (1.0 + 3.0 * r * r)));
    const double pp = model::phi_prime(r);
    worst_phi = std::max(worst_phi, std::abs(pp * pp - 0.5 * model::a(r)));
    worst_jf = std::max(worst_jf, std::abs(model::j(model::f(r)) - r));
  }
  mk("fd_chain_f_to_a", worst_fa, 0.0, 1e-6);
  mk("identity_a_2ap2_as", worst_co21, 0.0, 1e-12);
  mk("identity_phi_prime_sq", worst_phi, 0.0, 1e-13);
  mk("inverse_j_of_f", worst_jf, 0.0, 1e-13);
  return out;
}

std::vector<verification::OracleReport> suite_regularization() {
  std::vector<verification::OracleReport> out;
  const Grid g = Grid::line(256, 1.0);
  Field u0 = Field::sample(g, [](double x, double) { return 0.999 * std::tanh(10.0 * (x - 0.5)); });
  double prev = -1.0;
  bool mono = true, bounds = true;
  double ratio_max = 0.0;
  const double e0 = diagnostics::energy(u0, ModelParams{});
  for (int k = 3; k <= 7; ++k) {
    const double d = std::pow(2.0, -k);
    Field ud = regularize::regularize_initial(u0, d);
    const auto rep = regularize::maximum_principle_check(u0, ud, d);
    bounds = bounds && rep.ok;
    Field diff = ud;
    for (long c = 0; c < diff.size(); ++c) diff.values[c] -= u0.values[c];
    const double l2 = grid_ops::norm_l2(diff);
    if (prev >= 0.0 && l2 >= prev) mono = false;
    prev = l2;
    ratio_max = std::max(ratio_max, diagnostics::energy(ud, ModelParams{}) / (1.0 + e0));
  }
  verification::OracleReport r;
  r.name = "regularization_tanh_battery";
  r.inputs = "delta in {2^-3..2^-7}, n=256";
  r.measured = ratio_max;
  r.reference = 0.0;
  r.tolerance = 50.0;  // delta-independent cap; a 1/delta blow-up would exceed it
  r.pass = bounds && mono && ratio_max <= 50.0;
  r.extra["bounds_ok"] = bounds;
  r.extra["l2_monotone"] = mono;
  out.push_back(r);
  return out;
}

std::vector<verification::OracleReport> suite_dispersion() {
  std::vector<verification::OracleReport> out;
  struct Case {
    double m, lambda, eps;
    int q;
    double L;
  };
  const Case cases[] = {{0.0, 3.0, 0.0, 1, 2 * M_PI}, {0.0, 1.0, 0.0, 1, 2 * M_PI},
                        {0.3, 3.0, 0.0, 1, 2 * M_PI}, {0.0, 3.0, 1.0, 1, 2 * M_PI},
                        {0.0, 3.0, 0.0, 2, 2 * M_PI}, {0.5, 1.0, 0.0, 1, M_PI}};
  for (const auto& c : cases) {
    ModelParams p;
    p.lambda = c.lambda;
    p.epsilon = c.eps;
    p.delta = 1.0 / 32.0;
    const Grid g = Grid::line(128, c.L);
    const double qh = c.q * M_PI / c.L;
    const double sigma = verification::dispersion_sigma(c.m, p, c.q, c.L);
    // dt small enough that the first-order-in-dt bias stays well under 1%
    const double stiff = qh * qh * (model::a(c.m) * (qh * qh + 1.0) + c.lambda) /
                         (1.0 + c.eps * qh * qh);
    const double dt = std::min(1e-2 / std::abs(sigma), 0.004 / stiff);
    StepperConfig cfg;
    cfg.dt = dt;
    Field u = Field::sample(g, [&](double x, double) {
      return c.m + 1e-6 * std::cos(c.q * M_PI * x / c.L);
    });
    Field mode = Field::sample(g, [&](double x, double) { return std::cos(c.q * M_PI * x / c.L); });
    const double mm = grid_ops::inner(mode, mode);
    std::vector<double> ts, la;
    SimState s = stepper::init_state(u, p, cfg);
    for (int step = 0; step < 40; ++step) {
      s = stepper::step(s, p, cfg);
      Field dev = s.u;
      for (long cc = 0; cc < dev.size(); ++cc) dev.values[cc] -= c.m;
      const double amp = grid_ops::inner(dev, mode) / mm;
      ts.push_back(s.t);
      la.push_back(std::log(std::abs(amp)));
    }
    // least-squares slope
    double st = 0, sl = 0, stt = 0, stl = 0;
    const int n = static_cast<int>(ts.size());
    for (int i = 0; i < n; ++i) {
      st += ts[i];
      sl += la[i];
      stt += ts[i] * ts[i];
      stl += ts[i] * la[i];
    }
    const double slope = (n * stl - st * sl) / (n * stt - st * st);
    verification::OracleReport r;
    r.name = "dispersion(m=" + format_double(c.m) + ",lambda=" + format_double(c.lambda) +
             ",eps=" + format_double(c.eps) + ",q=" + std::to_string(c.q) + ")";
    r.inputs = "L=" + format_double(c.L) + " dt=" + format_double(dt);
    r.measured = slope;
    r.reference = sigma;
    r.tolerance = 0.01 * std::abs(sigma);
    r.pass = std::abs(slope - sigma) <= r.tolerance;
    out.push_back(r);
  }
  return out;
}

std::vector<verification::OracleReport> suite_equivalence() {
  ModelParams p;
  p.lambda = 1.0;
  std::vector<verification::OracleReport> out;
  out.push_back(verification::formulation_equivalence_suite(
      [](double x) { return 0.5 * std::cos(M_PI * x); }, 64, 1.0, p, "u=0.5cos(pi x)"));
  out.push_back(verification::formulation_equivalence_suite(
      [](double x) { return 0.9 * std::cos(M_PI * x); }, 64, 1.0, p, "u=0.9cos(pi x)"));
  out.push_back(verification::formulation_equivalence_suite(
      [](double x) { return 0.3 + 0.4 * std::cos(2.0 * M_PI * x); }, 64, 1.0, p,
      "u=0.3+0.4cos(2pi x)"));
  return out;
}

std::vector<verification::OracleReport> suite_dpgg() {
  std::vector<verification::OracleReport> out;
  out.push_back(verification::dpgg_identity_check(Grid::line(256, 1.0),
                                                  verification::CosProfile{1.0, 1, 0, 0.0},
                                                  verification::h_square()));
  out.push_back(verification::dpgg_identity_check(Grid::line(256, 1.0),
                                                  verification::CosProfile{0.7, 3, 0, 0.0},
                                                  verification::h_entropy()));
  out.push_back(verification::dpgg_identity_check(Grid::rect(96, 96, 1.0, 1.0),
                                                  verification::CosProfile{1.0, 1, 1, 0.0},
                                                  verification::h_entropy()));
  out.push_back(verification::dpgg_identity_check(Grid::rect(96, 96, 1.0, 1.0),
                                                  verification::CosProfile{0.5, 2, 1, 0.0},
                                                  verification::h_square()));
  return out;
}

std::vector<verification::OracleReport> suite_reference() {
  std::vector<verification::OracleReport> out;
  ModelParams p;
  p.lambda = 1.0;
  const Grid g = Grid::line(32, 2.0);
  Field u0 = Field::sample(g, [](double x, double) { return 0.1 + 0.4 * std::cos(M_PI * x / 2.0); });
  const double T = 2e-3;
  Field uref = verification::reference_integrate(u0, p, T);
  std::vector<double> errs;
  for (double dt : {2e-5, 1e-5, 5e-6}) {
    StepperConfig cfg;
    cfg.dt = dt;
    SimState s = stepper::run(u0, p, cfg, T);
    Field d = s.u;
    for (long c = 0; c < d.size(); ++c) d.values[c] -= uref.values[c];
    errs.push_back(grid_ops::norm_l2(d));
  }
  verification::OracleReport r;
  r.name = "implicit_vs_reference_order";
  r.inputs = "n=32 T=2e-3 dt={2e-5,1e-5,5e-6}";
  const double o1 = std::log2(errs[0] / errs[1]);
  const double o2 = std::log2(errs[1] / errs[2]);
  r.measured = 0.5 * (o1 + o2);
  r.reference = 1.0;
  r.tolerance = 0.2;
  r.pass = std::abs(o1 - 1.0) <= 0.2 && std::abs(o2 - 1.0) <= 0.2;
  r.extra["err_dt"] = errs[0];
  r.extra["order_1"] = o1;
  r.extra["order_2"] = o2;
  out.push_back(r);
  return out;
}

std::vector<verification::OracleReport> suite_delta() {
  const Grid g = Grid::line(128, 4.0);
  Field u0 = Field::sample(g, [](double x, double) { return 0.999 * std::tanh(5.0 * (x - 2.0)); });
  ModelParams p;
  p.lambda = 1.0;
  StepperConfig cfg;
  cfg.dt = 1e-3;
  return {verification::delta_continuation_study(u0, p, cfg, {0.125, 0.0625, 0.03125, 0.015625},
                                                 0.05, 0.01)};
}

}  // namespace

int run_verification(const std::string& suite, const std::string& out_dir, std::ostream& log) {
  std::vector<verification::OracleReport> reports;
  auto extend = [&](std::vector<verification::OracleReport> v) {
    for (auto& r : v) reports.push_back(std::move(r));
  };
  const bool all = suite == "all";
  bool known = all;
  if (all || suite == "identities") extend(suite_identities()), known = true;
  if (all || suite == "regularization") extend(suite_regularization()), known = true;
  if (all || suite == "dispersion") extend(suite_dispersion()), known = true;
  if (all || suite == "equivalence") extend(suite_equivalence()), known = true;
  if (all || suite == "dpgg") extend(suite_dpgg()), known = true;
  if (all || suite == "reference") extend(suite_reference()), known = true;
  if (all || suite == "delta") extend(suite_delta()), known = true;
  if (!known) {
    log << "unknown verification suite '" << suite
        << "' (expected identities|regularization|dispersion|equivalence|dpgg|reference|delta|all)\n";
    return 2;
  }
  bool ok = true;
  ordered_json j = ordered_json::array();
  for (const auto& r : reports) {
    print_report(log, r);
    j.push_back(report_json(r));
    ok = ok && r.pass;
  }
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    std::ofstream f(fs::path(out_dir) / ("verify_" + suite + ".json"));
    f << j.dump(2) << "\n";
  }
  log << (ok ? "all oracles passed" : "ORACLE FAILURES PRESENT") << "\n";
  return ok ? 0 : 1;
}

int run_sweep(const RunConfig& base, const std::string& axis,
              const std::vector<std::string>& values, bool strict) {
  if (values.empty()) throw ConfigError("sweep: no values given");
  const fs::path root(base.out_dir);
  fs::create_directories(root);
  struct Member {
    std::string value;
    RunConfig cfg;
    int status = -1;
  };
  std::vector<Member> members;
  for (const auto& v : values) {
    Member m;
    m.value = v;
    m.cfg = base;
    apply_key(m.cfg, axis, v);
    std::string tag = axis + "_" + v;
    for (char& ch : tag)
      if (ch == '.' || ch == '/' || ch == ' ') ch = '-';
    m.cfg.out_dir = (root / tag).string();
    m.cfg.validate();
    members.push_back(std::move(m));
  }
  const unsigned workers =
      std::max(1u, std::min<unsigned>(std::thread::hardware_concurrency(),
                                      static_cast<unsigned>(members.size())));
  std::vector<std::thread> pool;
  std::atomic<size_t> next{0};
  auto work = [&]() {
    for (;;) {
      const size_t i = next.fetch_add(1);
      if (i >= members.size()) return;
      members[i].status = run_simulation(members[i].cfg, strict);
    }
  };
  for (unsigned wkr = 0; wkr < workers; ++wkr) pool.emplace_back(work);
  for (auto& t : pool) t.join();

  std::ofstream sum(root / "sweep_summary.csv", std::ios::trunc);
  sum << axis << ",status,out_dir\n";
  bool ok = true;
  for (const auto& m : members) {
    sum << m.value << ',' << (m.status == 0 ? "ok" : "failed") << ',' << m.cfg.out_dir << '\n';
    ok = ok && m.status == 0;
  }
  return ok ? 0 : 1;
}

int inspect_snapshot(const std::filesystem::path& path, std::ostream& out) {
  Snapshot s = read_snapshot(path);
  const Grid& g = s.field.grid;
  out << "snapshot " << path.string() << "\n";
  out << "  time   = " << format_double(s.time) << "\n";
  out << "  ndims  = " << g.ndims << "\n";
  out << "  dims   = " << g.n[0];
  if (g.ndims == 2) out << " x " << g.n[1];
  out << "\n  length = " << format_double(g.length[0]);
  if (g.ndims == 2) out << " x " << format_double(g.length[1]);
  out << "\n  min    = " << format_double(s.field.min()) << "\n";
  out << "  max    = " << format_double(s.field.max()) << "\n";
  out << "  mean   = " << format_double(grid_ops::mean(s.field)) << "\n";
  return 0;
}

}  // namespace chdg

#include "chdg/config.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "chdg/errors.hpp"

namespace chdg {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

double parse_double(const std::string& v, const std::string& key, int line) {
  try {
    size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects a number, got '" + v + "'", line);
  }
}

long parse_int(const std::string& v, const std::string& key, int line) {
  try {
    size_t pos = 0;
    const long x = std::stol(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("trailing characters");
    return x;
  } catch (const std::exception&) {
    throw ConfigError("config: key '" + key + "' expects an integer, got '" + v + "'", line);
  }
}

}  // namespace

Grid RunConfig::make_grid() const {
  return ndims == 1 ? Grid::line(nx, lx) : Grid::rect(nx, ny, lx, ly);
}

void RunConfig::validate() const {
  auto fail = [](const std::string& msg) { throw ConfigError("config: " + msg); };
  if (ndims != 1 && ndims != 2) fail("grid.ndims must be 1 or 2");
  if (nx < 3) fail("grid.nx must be >= 3");
  if (!(lx > 0.0)) fail("grid.lx must be > 0");
  if (ndims == 2) {
    if (ny < 3) fail("grid.ny must be >= 3");
    if (!(ly > 0.0)) fail("grid.ly must be > 0");
  }
  if (!(t_end >= 0.0)) fail("run.t_end is required and must be >= 0");
  if (stride < 1) fail("run.stride must be >= 1");
  if (snapshot_stride < 0) fail("run.snapshot_stride must be >= 0");
  try {
    model.validate();
    stepper.validate(model);
  } catch (const std::exception& e) {
    fail(e.what());
  }
  if (ic.type != IcSpec::Type::file && !(std::abs(ic.m) < 1.0))
    fail("ic.m must lie strictly inside (-1, 1)");
  if (ic.type == IcSpec::Type::cosine || ic.type == IcSpec::Type::tanh_front) {
    if (!(std::abs(ic.m) + std::abs(ic.amplitude) <= 1.0))
      fail("|ic.m| + |ic.amplitude| must not exceed 1");
  }
  if (ic.type == IcSpec::Type::file && ic.path.empty()) fail("ic.path is required for ic.type=file");
  if (ic.perturbation < 0.0) fail("ic.perturbation must be >= 0");
  if (ic.perturb_modes < 1) fail("ic.perturb_modes must be >= 1");
}

void apply_key(RunConfig& cfg, const std::string& key, const std::string& value, int line) {
  const std::string v = trim(value);
  if (key == "grid.ndims") cfg.ndims = static_cast<int>(parse_int(v, key, line));
  else if (key == "grid.nx" || key == "grid.n") cfg.nx = static_cast<int>(parse_int(v, key, line));
  else if (key == "grid.ny") cfg.ny = static_cast<int>(parse_int(v, key, line));
  else if (key == "grid.lx" || key == "grid.length") cfg.lx = parse_double(v, key, line);
  else if (key == "grid.ly") cfg.ly = parse_double(v, key, line);
  else if (key == "model.lambda") cfg.model.lambda = parse_double(v, key, line);
  else if (key == "model.epsilon") cfg.model.epsilon = parse_double(v, key, line);
  else if (key == "model.delta") cfg.model.delta = parse_double(v, key, line);
  else if (key == "model.p") cfg.model.entropy_p = parse_double(v, key, line);
  else if (key == "model.k_delta") cfg.model.k_delta = parse_double(v, key, line);
  else if (key == "stepper.scheme") {
    if (v == "convex_splitting") cfg.stepper.scheme = Scheme::convex_splitting;
    else if (v == "backward_euler_full") cfg.stepper.scheme = Scheme::backward_euler_full;
    else throw ConfigError("config: unknown stepper.scheme '" + v + "'", line);
  } else if (key == "stepper.dt") cfg.stepper.dt = parse_double(v, key, line);
  else if (key == "stepper.newton_tol") cfg.stepper.newton_tol = parse_double(v, key, line);
  else if (key == "stepper.newton_max_iter")
    cfg.stepper.newton_max_iter = static_cast<int>(parse_int(v, key, line));
  else if (key == "stepper.clip_margin") cfg.stepper.clip_margin = parse_double(v, key, line);
  else if (key == "run.t_end") cfg.t_end = parse_double(v, key, line);
  else if (key == "run.stride") cfg.stride = static_cast<int>(parse_int(v, key, line));
  else if (key == "run.snapshot_stride") cfg.snapshot_stride = parse_int(v, key, line);
  else if (key == "run.seed") cfg.seed = static_cast<std::uint64_t>(parse_int(v, key, line));
  else if (key == "run.out") cfg.out_dir = v;
  else if (key == "ic.type") {
    if (v == "constant") cfg.ic.type = IcSpec::Type::constant;
    else if (v == "cosine") cfg.ic.type = IcSpec::Type::cosine;
    else if (v == "tanh") cfg.ic.type = IcSpec::Type::tanh_front;
    else if (v == "file") cfg.ic.type = IcSpec::Type::file;
    else throw ConfigError("config: unknown ic.type '" + v + "'", line);
  } else if (key == "ic.m") cfg.ic.m = parse_double(v, key, line);
  else if (key == "ic.amplitude") cfg.ic.amplitude = parse_double(v, key, line);
  else if (key == "ic.mode") cfg.ic.mode = static_cast<int>(parse_int(v, key, line));
  else if (key == "ic.steepness") cfg.ic.steepness = parse_double(v, key, line);
  else if (key == "ic.path") cfg.ic.path = v;
  else if (key == "ic.perturbation") cfg.ic.perturbation = parse_double(v, key, line);
  else if (key == "ic.perturb_modes") cfg.ic.perturb_modes = static_cast<int>(parse_int(v, key, line));
  else throw ConfigError("config: unknown key '" + key + "'", line);
}

RunConfig parse_config(const std::string& text) {
  RunConfig cfg;
  std::istringstream in(text);
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto hash = raw.find('#');
    std::string s = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (s.empty()) continue;
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      throw ConfigError("config: expected 'key = value', got '" + s + "'", line);
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) throw ConfigError("config: empty key", line);
    apply_key(cfg, key, value, line);
  }
  cfg.validate();
  return cfg;
}

namespace {
std::string num(double v) {
  char buf[32];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}
}  // namespace

std::string render_config(const RunConfig& cfg) {
  std::ostringstream o;
  o << "grid.ndims = " << cfg.ndims << "\n";
  o << "grid.nx = " << cfg.nx << "\n";
  if (cfg.ndims == 2) o << "grid.ny = " << cfg.ny << "\n";
  o << "grid.lx = " << num(cfg.lx) << "\n";
  if (cfg.ndims == 2) o << "grid.ly = " << num(cfg.ly) << "\n";
  o << "model.lambda = " << num(cfg.model.lambda) << "\n";
  o << "model.epsilon = " << num(cfg.model.epsilon) << "\n";
  o << "model.delta = " << num(cfg.model.delta) << "\n";
  o << "model.p = " << num(cfg.model.entropy_p) << "\n";
  o << "model.k_delta = " << num(cfg.model.k_delta_effective()) << "\n";
  o << "stepper.scheme = "
    << (cfg.stepper.scheme == Scheme::convex_splitting ? "convex_splitting"
                                                       : "backward_euler_full")
    << "\n";
  o << "stepper.dt = " << num(cfg.stepper.effective_dt(cfg.make_grid())) << "\n";
  o << "stepper.newton_tol = " << num(cfg.stepper.newton_tol) << "\n";
  o << "stepper.newton_max_iter = " << cfg.stepper.newton_max_iter << "\n";
  o << "stepper.clip_margin = " << num(cfg.stepper.effective_clip_margin(cfg.model)) << "\n";
  o << "run.t_end = " << num(cfg.t_end) << "\n";
  o << "run.stride = " << cfg.stride << "\n";
  o << "run.snapshot_stride = " << cfg.snapshot_stride << "\n";
  o << "run.seed = " << cfg.seed << "\n";
  o << "run.out = " << cfg.out_dir << "\n";
  switch (cfg.ic.type) {
    case IcSpec::Type::constant: o << "ic.type = constant\n"; break;
    case IcSpec::Type::cosine: o << "ic.type = cosine\n"; break;
    case IcSpec::Type::tanh_front: o << "ic.type = tanh\n"; break;
    case IcSpec::Type::file: o << "ic.type = file\n"; break;
  }
  if (cfg.ic.type == IcSpec::Type::file) {
    o << "ic.path = " << cfg.ic.path << "\n";
  } else {
    o << "ic.m = " << num(cfg.ic.m) << "\n";
    if (cfg.ic.type == IcSpec::Type::cosine) {
      o << "ic.mode = " << cfg.ic.mode << "\n";
      o << "ic.amplitude = " << num(cfg.ic.amplitude) << "\n";
    }
    if (cfg.ic.type == IcSpec::Type::tanh_front) {
      o << "ic.steepness = " << num(cfg.ic.steepness) << "\n";
      o << "ic.amplitude = " << num(cfg.ic.amplitude) << "\n";
    }
  }
  o << "ic.perturbation = " << num(cfg.ic.perturbation) << "\n";
  o << "ic.perturb_modes = " << cfg.ic.perturb_modes << "\n";
  return o.str();
}

}  // namespace chdg

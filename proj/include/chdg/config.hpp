// config.hpp -- line-oriented `key = value` run configuration with dotted
// section prefixes (grid.n, model.lambda, ...), `#` comments, strict
// unknown-key rejection.

#ifndef CHDG_CONFIG_HPP
#define CHDG_CONFIG_HPP

#include <cstdint>
#include <string>

#include "chdg/model.hpp"
#include "chdg/stepper.hpp"

namespace chdg {

struct IcSpec {
  enum class Type { constant, cosine, tanh_front, file };
  Type type = Type::constant;
  double m = 0.0;            // mean (constant / cosine / tanh)
  double amplitude = 0.0;    // cosine / tanh scale
  int mode = 1;              // cosine mode index
  double steepness = 10.0;   // tanh front steepness
  std::string path;          // snapshot file for type=file
  double perturbation = 0.0; // amplitude of the seeded low-mode perturbation
  int perturb_modes = 8;
};

struct RunConfig {
  // grid
  int ndims = 1;
  int nx = 0, ny = 0;
  double lx = 0.0, ly = 0.0;

  ModelParams model;
  StepperConfig stepper;

  double t_end = -1.0;
  int stride = 1;
  long snapshot_stride = 0;  // 0 = initial and final snapshots only
  IcSpec ic;
  std::uint64_t seed = 0;
  std::string out_dir = "out";

  Grid make_grid() const;
  void validate() const;  // throws ConfigError
};

// applies one dotted key; used by the parser and by sweep overrides
void apply_key(RunConfig& cfg, const std::string& key, const std::string& value, int line = 0);

// strict parse: unknown keys, malformed lines, constraint violations all
// throw ConfigError carrying the 1-based line number.
RunConfig parse_config(const std::string& text);

// normalized echo of the effective configuration (defaults resolved)
std::string render_config(const RunConfig& cfg);

}  // namespace chdg

#endif

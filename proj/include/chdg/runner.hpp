// runner.hpp -- run orchestration behind the CLI verbs: simulate a config,
// run a verification suite, sweep a config axis, inspect a snapshot.

#ifndef CHDG_RUNNER_HPP
#define CHDG_RUNNER_HPP

#include <filesystem>
#include <iosfwd>
#include <string>
#include <vector>

#include "chdg/config.hpp"

namespace chdg {

// builds the configured initial condition (before regularization)
Field build_initial(const RunConfig& cfg);

// regularize + integrate; writes diagnostics.csv, snapshots, run.json into
// cfg.out_dir. Returns 0 iff the run completed and all invariant monitors
// passed. On failure keeps partial output next to a FAILED marker file.
int run_simulation(const RunConfig& cfg, bool strict = false);

// suites: identities | regularization | dispersion | equivalence | dpgg |
// reference | delta | all. Prints one line per oracle; returns 0 iff all
// pass. Writes verify_<suite>.json when out_dir is non-empty.
int run_verification(const std::string& suite, const std::string& out_dir, std::ostream& log);

// one run per axis value in out/<axis>_<value>/; writes sweep_summary.csv
int run_sweep(const RunConfig& base, const std::string& axis,
              const std::vector<std::string>& values, bool strict = false);

int inspect_snapshot(const std::filesystem::path& path, std::ostream& out);

// shortest round-trip decimal of a 64-bit float
std::string format_double(double v);

}  // namespace chdg

#endif

#pragma once

#include <filesystem>
#include <string>

#include "ringctl/experiment.hpp"

namespace ringctl {

/// Parses the key-value experiment format (see README for the schema).
/// Unknown sections or keys are rejected. Angle values accept a "pi"
/// suffix ("0.4pi", "pi").
ExperimentSpec parse_spec(const std::string& text);
ExperimentSpec load_spec(const std::filesystem::path& file);

/// Serializes a fully resolved spec; the output parses back identically and
/// doubles as the run manifest.
std::string manifest_text(const ExperimentSpec& spec);

/// Writes every artifact of one run into `dir`:
///   manifest.ini    resolved spec (re-runnable)
///   runinfo.ini     measured constants, bound verdicts, terminal metrics
///   metrics.csv     t, err_l2, kl, mass, bound_lhs, bound_rhs, bound_ok
///   bounds.csv      per-sample inequality record (when a bound applies)
///   snapshot_<t>.csv  x, rho, rho_d, u_field
///   micromacro.csv  t, kl_kde_pde (open-loop consistency runs)
void write_run_outputs(const RunResult& result, const std::filesystem::path& dir);

/// sweep.csv (axes + terminal metrics per combination, rows in axis order)
/// plus manifest.ini for the base spec; each combination's own outputs go to
/// a subdirectory named after its label.
void write_sweep_outputs(const SweepResult& result, const std::filesystem::path& dir);

/// Re-runs the inequality checks for a run directory written by
/// write_run_outputs, from metrics.csv + runinfo.ini alone.
struct BoundsRecheck {
  BoundMode mode = BoundMode::kNone;
  bool enforced = false;
  BoundReport report;
  double steady_bound = 0.0;
  double terminal_eta = 0.0;
};
BoundsRecheck check_bounds_dir(const std::filesystem::path& dir);

}  // namespace ringctl

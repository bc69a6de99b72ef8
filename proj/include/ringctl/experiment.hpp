#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "ringctl/bounds.hpp"
#include "ringctl/controller.hpp"
#include "ringctl/macro.hpp"
#include "ringctl/micro.hpp"
#include "ringctl/ring.hpp"

namespace ringctl {

enum class LoopMode { kMacro, kMicro };
enum class MacroControlForm { kSource, kVelocity };
enum class AgentInit { kEven, kSample };
enum class BoundMode { kNone, kLimitedSensing, kDisturbance, kKernelMismatch };

/// Density the controller closes its loop on in micro mode: the estimate
/// from agent positions, or the state of a synthesis model integrated with
/// the controller's own kernel (the agents are then driven open loop by the
/// sampled velocity field).
enum class MicroFeedback { kAgents, kModel };

/// Which kernel advects the reference density. `kPlant` is the analysis
/// framing (the desired trajectory follows the true interactions) and keeps
/// the decay inequalities exact. `kController` is the deployment framing: the
/// designer can only integrate the desired dynamics with the kernel it
/// believes in, so a kernel mismatch leaves a persistent tracking burden.
enum class ReferenceKernel { kPlant, kController };

/// Synthesis-kernel choice: the plant kernel itself or a Morse kernel with
/// its own strength/length parameters.
struct KernelVariant {
  bool nominal = true;
  double G = 0.0;
  double L = 0.0;

  static KernelVariant plant() { return {}; }
  static KernelVariant morse(double g, double l) { return {false, g, l}; }
  std::string label() const;
};

/// Fully resolved description of one scenario (or a sweep over scenarios).
struct ExperimentSpec {
  std::string name = "custom";
  LoopMode mode = LoopMode::kMacro;
  std::uint64_t seed = 20240601;
  double t_final = 6.0;
  int grid_cells = 256;

  int n_agents = 100;
  AgentInit agent_init = AgentInit::kEven;
  double kde_bandwidth = 0.0;  // 0 = auto: 2 pi / sqrt(n_agents)
  MicroFeedback micro_feedback = MicroFeedback::kAgents;

  double kernel_G = 0.5;
  double kernel_L = 0.5;

  double target_mu = 0.0;
  double target_kappa = 4.0;
  ReferenceKernel reference_kernel = ReferenceKernel::kPlant;

  bool control_enabled = true;
  double kp = 10.0;
  double ki = 0.0;
  double sensing_radius = kPi;
  KernelVariant controller_kernel;
  MacroControlForm macro_form = MacroControlForm::kSource;

  double disturbance_amplitude = 0.0;
  double disturbance_switch_time = 3.0;

  // sweep axes; empty = not swept
  std::vector<double> sweep_sensing_radius;
  std::vector<double> sweep_kp;
  std::vector<double> sweep_amplitude;
  std::vector<double> sweep_ki;
  std::vector<KernelVariant> sweep_kernel;

  std::string out_dir;
  std::vector<double> snapshot_times;  // default (empty): 0, t_f/2, t_f
  bool record_micro_macro = false;     // KDE-vs-PDE divergence (open loop)

  void validate() const;
  double resolved_bandwidth() const;
  std::vector<double> resolved_snapshot_times() const;
  bool has_sweep() const;
};

/// Time series sampled at every accepted step (row 0 is the initial state).
struct MetricsSeries {
  std::vector<double> t;
  std::vector<double> err_l2;
  std::vector<double> kl;
  std::vector<double> mass;
  std::vector<double> bound_lhs;
  std::vector<double> bound_rhs;
  std::vector<int> bound_ok;

  std::size_t size() const { return t.size(); }
  double terminal_err() const { return err_l2.empty() ? 0.0 : err_l2.back(); }
  double terminal_kl() const { return kl.empty() ? 0.0 : kl.back(); }
};

struct Snapshot {
  double t = 0.0;
  RingField rho;
  RingField rho_d;
  RingField u;
};

struct RunResult {
  ExperimentSpec spec;  // resolved single-point spec
  std::uint64_t run_seed = 0;
  MetricsSeries metrics;
  BoundMode bound_mode = BoundMode::kNone;
  bool bound_enforced = false;  // macro trajectory governed by a theorem
  BoundConstants constants;
  BoundReport report;
  double eta0 = 0.0;
  double steady_bound = 0.0;  // disturbance runs: bound on lim eta
  std::vector<Snapshot> snapshots;
  std::vector<std::pair<double, double>> micro_macro_kl;
  double clipped_mass = 0.0;
  double zero_mean_residual = 0.0;
  double wall_seconds = 0.0;  // not written to output files
};

RunResult run_experiment(const ExperimentSpec& spec);

struct SweepRow {
  std::string label;
  double sensing_radius = 0.0;
  double kp = 0.0;
  double ki = 0.0;
  double amplitude = 0.0;
  KernelVariant kernel;
  double terminal_err = 0.0;
  double terminal_kl = 0.0;
  int bound_violations = 0;
  int envelope_violations = 0;
  bool hypothesis_met = true;
  bool bound_enforced = false;
};

struct SweepResult {
  ExperimentSpec base;
  std::vector<SweepRow> rows;
  std::vector<RunResult> runs;  // same order as rows
};

/// Cartesian product over the non-empty axes, executed in parallel; row
/// order (and every per-run output) is independent of scheduling.
SweepResult run_sweep(const ExperimentSpec& spec);

/// Named scenario presets mirroring the harness's standard experiments.
ExperimentSpec preset(const std::string& name);
std::vector<std::string> preset_names();

/// Derived per-run seed: splitmix64 mix of the root seed and the run index.
std::uint64_t derive_seed(std::uint64_t root, std::uint64_t index);

BoundMode classify_bound_mode(const ExperimentSpec& spec);
std::string to_string(LoopMode m);
std::string to_string(MacroControlForm f);
std::string to_string(AgentInit a);
std::string to_string(BoundMode b);
std::string to_string(MicroFeedback f);

}  // namespace ringctl

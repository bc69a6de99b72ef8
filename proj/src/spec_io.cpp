#include "ringctl/spec_io.hpp"

#include <charconv>
#include <cmath>
#include <map>
#include <sstream>

#include "ringctl/csv.hpp"
#include "ringctl/norms.hpp"

namespace ringctl {

namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r");
  return s.substr(a, b - a + 1);
}

using Section = std::map<std::string, std::string>;
using IniMap = std::map<std::string, Section>;

IniMap parse_ini(const std::string& text) {
  IniMap out;
  std::istringstream in(text);
  std::string line;
  std::string section;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    const std::string t = trim(line);
    if (t.empty() || t[0] == '#' || t[0] == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']') {
        throw SpecError("line " + std::to_string(lineno) + ": unterminated section");
      }
      section = trim(t.substr(1, t.size() - 2));
      out[section];
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos) {
      throw SpecError("line " + std::to_string(lineno) + ": expected key = value");
    }
    if (section.empty()) {
      throw SpecError("line " + std::to_string(lineno) + ": key outside a section");
    }
    const std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty()) {
      throw SpecError("line " + std::to_string(lineno) + ": empty key");
    }
    if (!out[section].emplace(key, value).second) {
      throw SpecError("line " + std::to_string(lineno) + ": duplicate key " + key);
    }
  }
  return out;
}

double parse_double(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  std::string body = s;
  double factor = 1.0;
  if (s.size() >= 2 && s.compare(s.size() - 2, 2, "pi") == 0) {
    factor = kPi;
    body = trim(s.substr(0, s.size() - 2));
    if (body.empty()) return kPi;
    if (body == "-") return -kPi;
  }
  double v = 0.0;
  const auto res = std::from_chars(body.data(), body.data() + body.size(), v);
  if (res.ec != std::errc() || res.ptr != body.data() + body.size()) {
    throw SpecError(where + ": cannot parse number '" + s + "'");
  }
  return v * factor;
}

std::uint64_t parse_u64(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  std::uint64_t v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw SpecError(where + ": cannot parse integer '" + s + "'");
  }
  return v;
}

int parse_int(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw SpecError(where + ": cannot parse integer '" + s + "'");
  }
  return v;
}

bool parse_bool(const std::string& raw, const std::string& where) {
  const std::string s = trim(raw);
  if (s == "true" || s == "1" || s == "yes" || s == "on") return true;
  if (s == "false" || s == "0" || s == "no" || s == "off") return false;
  throw SpecError(where + ": cannot parse boolean '" + s + "'");
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> parts;
  std::string cur;
  for (char ch : s) {
    if (ch == sep) {
      parts.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  parts.push_back(cur);
  return parts;
}

std::vector<double> parse_double_list(const std::string& raw,
                                      const std::string& where) {
  std::vector<double> out;
  for (const auto& part : split(raw, ',')) {
    const std::string p = trim(part);
    if (p.empty()) continue;
    out.push_back(parse_double(p, where));
  }
  return out;
}

KernelVariant parse_kernel_variant(const std::string& raw,
                                   const std::string& where) {
  const std::string s = trim(raw);
  if (s == "nominal") return KernelVariant::plant();
  std::istringstream in(s);
  double g = 0.0, l = 0.0;
  if (!(in >> g >> l)) {
    throw SpecError(where + ": expected 'nominal' or '<G> <L>', got '" + s + "'");
  }
  std::string rest;
  if (in >> rest) {
    throw SpecError(where + ": trailing content in kernel variant '" + s + "'");
  }
  return KernelVariant::morse(g, l);
}

std::string fmt(double v) { return CsvWriter::format(v); }
std::string fmt(bool v) { return v ? "true" : "false"; }

}  // namespace

ExperimentSpec parse_spec(const std::string& text) {
  const IniMap ini = parse_ini(text);
  ExperimentSpec spec;
  for (const auto& [section, keys] : ini) {
    for (const auto& [key, value] : keys) {
      const std::string where = "[" + section + "] " + key;
      if (section == "experiment") {
        if (key == "name") spec.name = value;
        else if (key == "mode") {
          if (value == "macro") spec.mode = LoopMode::kMacro;
          else if (value == "micro") spec.mode = LoopMode::kMicro;
          else throw SpecError(where + ": expected macro|micro");
        } else if (key == "seed") spec.seed = parse_u64(value, where);
        else if (key == "t_final") spec.t_final = parse_double(value, where);
        else throw SpecError("unknown key " + where);
      } else if (section == "grid") {
        if (key == "cells") spec.grid_cells = parse_int(value, where);
        else throw SpecError("unknown key " + where);
      } else if (section == "agents") {
        if (key == "count") spec.n_agents = parse_int(value, where);
        else if (key == "init") {
          if (value == "even") spec.agent_init = AgentInit::kEven;
          else if (value == "sample") spec.agent_init = AgentInit::kSample;
          else throw SpecError(where + ": expected even|sample");
        } else if (key == "kde_bandwidth") {
          spec.kde_bandwidth = value == "auto" ? 0.0 : parse_double(value, where);
        } else throw SpecError("unknown key " + where);
      } else if (section == "kernel") {
        if (key == "G") spec.kernel_G = parse_double(value, where);
        else if (key == "L") spec.kernel_L = parse_double(value, where);
        else throw SpecError("unknown key " + where);
      } else if (section == "target") {
        if (key == "mu") spec.target_mu = parse_double(value, where);
        else if (key == "kappa") spec.target_kappa = parse_double(value, where);
        else throw SpecError("unknown key " + where);
      } else if (section == "controller") {
        if (key == "enabled") spec.control_enabled = parse_bool(value, where);
        else if (key == "kp") spec.kp = parse_double(value, where);
        else if (key == "ki") spec.ki = parse_double(value, where);
        else if (key == "sensing_radius") spec.sensing_radius = parse_double(value, where);
        else if (key == "kernel") spec.controller_kernel = parse_kernel_variant(value, where);
        else if (key == "feedback") {
          if (value == "agents") spec.micro_feedback = MicroFeedback::kAgents;
          else if (value == "model") spec.micro_feedback = MicroFeedback::kModel;
          else throw SpecError(where + ": expected agents|model");
        } else if (key == "macro_form") {
          if (value == "source") spec.macro_form = MacroControlForm::kSource;
          else if (value == "velocity") spec.macro_form = MacroControlForm::kVelocity;
          else throw SpecError(where + ": expected source|velocity");
        } else throw SpecError("unknown key " + where);
      } else if (section == "disturbance") {
        if (key == "amplitude") spec.disturbance_amplitude = parse_double(value, where);
        else if (key == "switch_time") spec.disturbance_switch_time = parse_double(value, where);
        else throw SpecError("unknown key " + where);
      } else if (section == "sweep") {
        if (key == "sensing_radius") spec.sweep_sensing_radius = parse_double_list(value, where);
        else if (key == "kp") spec.sweep_kp = parse_double_list(value, where);
        else if (key == "amplitude") spec.sweep_amplitude = parse_double_list(value, where);
        else if (key == "ki") spec.sweep_ki = parse_double_list(value, where);
        else if (key == "kernel") {
          spec.sweep_kernel.clear();
          for (const auto& part : split(value, ';')) {
            if (trim(part).empty()) continue;
            spec.sweep_kernel.push_back(parse_kernel_variant(part, where));
          }
        } else throw SpecError("unknown key " + where);
      } else if (section == "output") {
        if (key == "directory") spec.out_dir = value;
        else if (key == "snapshot_times") spec.snapshot_times = parse_double_list(value, where);
        else if (key == "micro_macro") spec.record_micro_macro = parse_bool(value, where);
        else throw SpecError("unknown key " + where);
      } else {
        throw SpecError("unknown section [" + section + "]");
      }
    }
  }
  spec.validate();
  return spec;
}

ExperimentSpec load_spec(const std::filesystem::path& file) {
  return parse_spec(read_text_file(file));
}

std::string manifest_text(const ExperimentSpec& spec) {
  std::ostringstream out;
  out << "[experiment]\n";
  out << "name = " << spec.name << "\n";
  out << "mode = " << to_string(spec.mode) << "\n";
  out << "seed = " << spec.seed << "\n";
  out << "t_final = " << fmt(spec.t_final) << "\n";
  out << "\n[grid]\n";
  out << "cells = " << spec.grid_cells << "\n";
  out << "\n[agents]\n";
  out << "count = " << spec.n_agents << "\n";
  out << "init = " << to_string(spec.agent_init) << "\n";
  out << "kde_bandwidth = " << fmt(spec.resolved_bandwidth()) << "\n";
  out << "\n[kernel]\n";
  out << "G = " << fmt(spec.kernel_G) << "\n";
  out << "L = " << fmt(spec.kernel_L) << "\n";
  out << "\n[target]\n";
  out << "mu = " << fmt(spec.target_mu) << "\n";
  out << "kappa = " << fmt(spec.target_kappa) << "\n";
  out << "\n[controller]\n";
  out << "enabled = " << fmt(spec.control_enabled) << "\n";
  out << "kp = " << fmt(spec.kp) << "\n";
  out << "ki = " << fmt(spec.ki) << "\n";
  out << "sensing_radius = " << fmt(spec.sensing_radius) << "\n";
  out << "kernel = "
      << (spec.controller_kernel.nominal
              ? std::string("nominal")
              : fmt(spec.controller_kernel.G) + " " + fmt(spec.controller_kernel.L))
      << "\n";
  out << "feedback = " << to_string(spec.micro_feedback) << "\n";
  out << "macro_form = " << to_string(spec.macro_form) << "\n";
  out << "\n[disturbance]\n";
  out << "amplitude = " << fmt(spec.disturbance_amplitude) << "\n";
  out << "switch_time = " << fmt(spec.disturbance_switch_time) << "\n";
  auto list = [](const std::vector<double>& v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) s += ", ";
      s += fmt(v[i]);
    }
    return s;
  };
  if (spec.has_sweep()) {
    out << "\n[sweep]\n";
    if (!spec.sweep_sensing_radius.empty()) {
      out << "sensing_radius = " << list(spec.sweep_sensing_radius) << "\n";
    }
    if (!spec.sweep_kp.empty()) out << "kp = " << list(spec.sweep_kp) << "\n";
    if (!spec.sweep_amplitude.empty()) {
      out << "amplitude = " << list(spec.sweep_amplitude) << "\n";
    }
    if (!spec.sweep_ki.empty()) out << "ki = " << list(spec.sweep_ki) << "\n";
    if (!spec.sweep_kernel.empty()) {
      out << "kernel = ";
      for (std::size_t i = 0; i < spec.sweep_kernel.size(); ++i) {
        if (i) out << "; ";
        const auto& kv = spec.sweep_kernel[i];
        if (kv.nominal) out << "nominal";
        else out << fmt(kv.G) << " " << fmt(kv.L);
      }
      out << "\n";
    }
  }
  out << "\n[output]\n";
  if (!spec.out_dir.empty()) out << "directory = " << spec.out_dir << "\n";
  out << "snapshot_times = " << list(spec.resolved_snapshot_times()) << "\n";
  out << "micro_macro = " << fmt(spec.record_micro_macro) << "\n";
  return out.str();
}

namespace {

std::string runinfo_text(const RunResult& r) {
  std::ostringstream out;
  out << "[run]\n";
  out << "run_seed = " << r.run_seed << "\n";
  out << "bound_mode = " << to_string(r.bound_mode) << "\n";
  out << "bound_enforced = " << fmt(r.bound_enforced) << "\n";
  out << "clipped_mass = " << fmt(r.clipped_mass) << "\n";
  out << "zero_mean_residual = " << fmt(r.zero_mean_residual) << "\n";
  out << "\n[constants]\n";
  out << "M = " << fmt(r.constants.M) << "\n";
  out << "L = " << fmt(r.constants.L) << "\n";
  out << "D1 = " << fmt(r.constants.D1) << "\n";
  out << "D2 = " << fmt(r.constants.D2) << "\n";
  out << "g_norm = " << fmt(r.constants.g_norm) << "\n";
  out << "gx_norm = " << fmt(r.constants.gx_norm) << "\n";
  out << "gtilde_norm = " << fmt(r.constants.gtilde_norm) << "\n";
  out << "gtildex_norm = " << fmt(r.constants.gtildex_norm) << "\n";
  out << "\n[bounds]\n";
  out << "hypothesis_met = " << fmt(r.report.hypothesis_met) << "\n";
  out << "tolerance = " << fmt(r.report.tolerance) << "\n";
  out << "violations = " << r.report.violations << "\n";
  out << "max_violation = " << fmt(r.report.max_violation) << "\n";
  out << "envelope_violations = " << r.report.envelope_violations << "\n";
  out << "eta0 = " << fmt(r.eta0) << "\n";
  out << "steady_bound = " << fmt(r.steady_bound) << "\n";
  if (!r.report.note.empty()) out << "note = " << r.report.note << "\n";
  out << "\n[results]\n";
  out << "samples = " << r.metrics.size() << "\n";
  out << "terminal_err_l2 = " << fmt(r.metrics.terminal_err()) << "\n";
  out << "terminal_kl = " << fmt(r.metrics.terminal_kl()) << "\n";
  return out.str();
}

}  // namespace

void write_run_outputs(const RunResult& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());

  write_text_file(dir / "manifest.ini", manifest_text(r.spec));
  write_text_file(dir / "runinfo.ini", runinfo_text(r));

  CsvWriter metrics({"t", "err_l2", "kl", "mass", "bound_lhs", "bound_rhs",
                     "bound_ok"});
  for (std::size_t i = 0; i < r.metrics.size(); ++i) {
    metrics.add_row({r.metrics.t[i], r.metrics.err_l2[i], r.metrics.kl[i],
                     r.metrics.mass[i], r.metrics.bound_lhs[i],
                     r.metrics.bound_rhs[i],
                     static_cast<double>(r.metrics.bound_ok[i])});
  }
  metrics.write(dir / "metrics.csv");

  if (r.bound_mode != BoundMode::kNone && !r.report.samples.empty()) {
    const bool with_envelope = !r.report.envelope.empty();
    std::vector<std::string> header{"t", "lhs", "rhs", "margin", "ok"};
    if (with_envelope) header.push_back("envelope");
    CsvWriter bounds(std::move(header));
    for (std::size_t i = 0; i < r.report.samples.size(); ++i) {
      const auto& s = r.report.samples[i];
      std::vector<double> row{s.t, s.lhs, s.rhs, s.margin,
                              static_cast<double>(s.ok ? 1 : 0)};
      if (with_envelope) row.push_back(r.report.envelope[i]);
      bounds.add_row(row);
    }
    bounds.write(dir / "bounds.csv");
  }

  for (const auto& snap : r.snapshots) {
    CsvWriter file({"x", "rho", "rho_d", "u_field"});
    const auto& grid = snap.rho.grid();
    for (int k = 0; k < grid.size(); ++k) {
      file.add_row({grid.node(k), snap.rho[k], snap.rho_d[k], snap.u[k]});
    }
    file.write(dir / ("snapshot_" + CsvWriter::format(snap.t) + ".csv"));
  }

  if (!r.micro_macro_kl.empty()) {
    CsvWriter mm({"t", "kl_kde_pde"});
    for (const auto& [t, v] : r.micro_macro_kl) mm.add_row({t, v});
    mm.write(dir / "micromacro.csv");
  }
}

void write_sweep_outputs(const SweepResult& r, const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create output directory " + dir.string());

  write_text_file(dir / "manifest.ini", manifest_text(r.base));

  CsvWriter sweep({"label", "kernel", "sensing_radius", "kp", "ki", "amplitude",
                   "terminal_err_l2", "terminal_kl", "bound_violations",
                   "envelope_violations", "hypothesis_met", "bound_enforced"});
  for (const auto& row : r.rows) {
    sweep.add_row_mixed({row.label, row.kernel.label(),
                         CsvWriter::format(row.sensing_radius),
                         CsvWriter::format(row.kp), CsvWriter::format(row.ki),
                         CsvWriter::format(row.amplitude),
                         CsvWriter::format(row.terminal_err),
                         CsvWriter::format(row.terminal_kl),
                         std::to_string(row.bound_violations),
                         std::to_string(row.envelope_violations),
                         row.hypothesis_met ? "1" : "0",
                         row.bound_enforced ? "1" : "0"});
  }
  sweep.write(dir / "sweep.csv");

  for (std::size_t i = 0; i < r.runs.size(); ++i) {
    write_run_outputs(r.runs[i], dir / "runs" / r.rows[i].label);
  }
}

BoundsRecheck check_bounds_dir(const std::filesystem::path& dir) {
  const ExperimentSpec spec = load_spec(dir / "manifest.ini");
  const IniMap info = parse_ini(read_text_file(dir / "runinfo.ini"));

  auto get = [&info](const std::string& section, const std::string& key,
                     double fallback) {
    const auto s = info.find(section);
    if (s == info.end()) return fallback;
    const auto k = s->second.find(key);
    if (k == s->second.end()) return fallback;
    return parse_double(k->second, section + "." + key);
  };

  BoundsRecheck out;
  {
    const auto s = info.find("run");
    if (s != info.end()) {
      const auto m = s->second.find("bound_mode");
      if (m != s->second.end()) {
        if (m->second == "limited-sensing") out.mode = BoundMode::kLimitedSensing;
        else if (m->second == "disturbance") out.mode = BoundMode::kDisturbance;
        else if (m->second == "kernel-mismatch") out.mode = BoundMode::kKernelMismatch;
        else out.mode = BoundMode::kNone;
      }
      const auto e = s->second.find("bound_enforced");
      if (e != s->second.end()) out.enforced = e->second == "true";
    }
  }

  BoundConstants c;
  c.M = get("constants", "M", 0.0);
  c.L = get("constants", "L", 0.0);
  c.D1 = get("constants", "D1", 0.0);
  c.D2 = get("constants", "D2", 0.0);
  c.g_norm = get("constants", "g_norm", 0.0);
  c.gx_norm = get("constants", "gx_norm", 0.0);
  c.gtilde_norm = get("constants", "gtilde_norm", 0.0);
  c.gtildex_norm = get("constants", "gtildex_norm", 0.0);

  const CsvTable metrics = read_csv(dir / "metrics.csv");
  const auto t = metrics.column_values("t");
  const auto err = metrics.column_values("err_l2");
  std::vector<double> eta(err.size());
  for (std::size_t i = 0; i < err.size(); ++i) eta[i] = err[i] * err[i];
  if (!eta.empty()) out.terminal_eta = eta.back();

  if (out.mode == BoundMode::kNone || eta.size() < 3) {
    out.mode = eta.size() < 3 ? BoundMode::kNone : out.mode;
    return out;
  }
  switch (out.mode) {
    case BoundMode::kLimitedSensing:
      out.report = check_limited_sensing_inequality(t, eta, c, spec.kp);
      break;
    case BoundMode::kKernelMismatch:
      out.report = check_kernel_perturbation_inequality(t, eta, c, spec.kp);
      break;
    case BoundMode::kDisturbance:
      out.report = check_disturbance_inequality(t, eta, c, spec.kp);
      if (out.report.hypothesis_met) {
        out.steady_bound = steady_state_bound(c, spec.kp);
      }
      break;
    case BoundMode::kNone:
      break;
  }
  return out;
}

}  // namespace ringctl

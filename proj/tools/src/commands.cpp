#include "commands.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include <topeig/errors.hpp>
#include <topeig/grid.hpp>
#include <topeig/operators.hpp>
#include <topeig/version.hpp>

#include "report_io.hpp"

namespace topeig::cli {

void apply_overrides(RunConfig& cfg, const Overrides& o) {
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.seed) cfg.seed = *o.seed;
  if (o.threads) {
    if (*o.threads < 1) throw ConfigError("--threads: must be at least 1");
    cfg.threads = *o.threads;
  }
}

std::string output_path(const RunConfig& cfg, const std::string& suffix) {
  return cfg.out_dir + "/" + cfg.prefix + suffix;
}

namespace {

void print_ladder(std::ostream& out, const CheckResult& c) {
  out << "  " << std::left << std::setw(12) << c.name << (c.passed ? "ok  " : "FAIL");
  if (!c.residuals.empty()) {
    out << "  residuals:";
    for (double r : c.residuals) out << ' ' << std::setprecision(3) << std::scientific << r;
    out << std::defaultfloat;
  }
  if (!c.detail.empty()) out << "  (" << c.detail << ")";
  out << '\n';
}

Grid choose_grid(const RunConfig& cfg, const ProfilePair& unit, std::string& reasoning) {
  if (!cfg.grid_auto) {
    reasoning = "fixed by configuration";
    return build_grid(cfg.dimension, cfg.grid_n, cfg.grid_l);
  }
  GridChoice c = suggest_grid(unit, cfg.k);
  reasoning = c.reasoning;
  return c.grid;
}

SolveMode effective_model_mode(const SolveSettings& s, const Grid& g) {
  if (s.mode != SolveMode::LanczosTop) return s.mode;
  return g.size() <= kDenseNodeLimit ? SolveMode::DenseFull : SolveMode::ShiftInvertBottom;
}

void print_summary(const StudyReport& r, std::ostream& out) {
  out << "grid " << r.grid.id() << " (" << r.grid_reasoning << ")\n";
  out << "sigma = " << format_number(r.sigma) << ", A0 V0^2 = " << format_number(r.rescale) << "\n";
  out << std::setprecision(10);
  for (const auto& m : r.model_eigenvalues)
    out << "mu_" << m.n << " = " << m.mu << "  (residual " << std::setprecision(2)
        << std::scientific << m.residual << std::defaultfloat << std::setprecision(10) << ")\n";
  out << "alpha          n  scaled_gap       residual\n";
  for (const auto& rec : r.records) {
    out << std::left << std::setw(14) << format_number(rec.alpha) << ' ' << std::setw(2) << rec.n
        << ' ' << std::setw(16) << rec.scaled_gap << std::setprecision(2) << std::scientific
        << rec.residual << std::defaultfloat << std::setprecision(10);
    if (!rec.converged) out << "  NOT CONVERGED: " << rec.note;
    out << '\n';
  }
  for (const auto& e : r.extrapolations) {
    out << "extrapolation n=" << e.n;
    if (e.degenerate) out << ": degenerate (" << e.note << ")\n";
    else
      out << ": limit " << e.limit << ", rate " << std::setprecision(4) << e.rate
          << std::setprecision(10) << (e.note.empty() ? "" : " (" + e.note + ")") << '\n';
  }
  for (const auto& v : r.verdicts) {
    out << "verdict n=" << v.n << ": " << to_string(v.status) << "  mu " << v.mu << ", final rel "
        << std::setprecision(3) << v.final_rel_error << " (<= " << v.tolerances.rel_final
        << "), extrap rel " << v.extrap_rel_error << " (<= " << v.tolerances.rel_extrap << ")"
        << std::setprecision(10) << '\n';
    for (const auto& why : v.reasons) out << "  - " << why << '\n';
  }
}

void write_outputs(const RunConfig& cfg, const StudyReport& r, std::ostream& out) {
  const std::string csv = cfg.prefix + "_records.csv";
  write_file_atomic(output_path(cfg, "_records.csv"), records_csv(r));
  write_file_atomic(output_path(cfg, "_report.json"), report_to_json(r, cfg.seed).dump(2) + "\n");
  write_file_atomic(output_path(cfg, "_plot.py"), plot_script(r, csv));
  std::vector<ModelRow> rows;
  for (const auto& m : r.model_eigenvalues)
    rows.push_back({m.n, m.mu, m.residual, r.grid.n_per_axis, r.grid.half_length,
                    std::string(to_string(r.model_settings.mode))});
  write_file_atomic(output_path(cfg, "_model.csv"), model_csv(rows));
  if (cfg.emit_eigenfunctions) {
    for (std::size_t i = 0; i < r.eigenvectors.size() && i < r.records.size(); ++i) {
      const auto& rec = r.records[i];
      if (!rec.converged) continue;
      std::ostringstream name;
      name << "_eig_a" << (i / static_cast<std::size_t>(r.k)) << "_n" << rec.n << ".bin";
      write_state_file(output_path(cfg, name.str()), r.eigenvectors[i]);
    }
  }
  out << "wrote " << output_path(cfg, "_{records.csv,report.json,plot.py,model.csv}") << '\n';
}

int sweep_common(const RunConfig& cfg, std::ostream& out, std::ostream& err, bool verify) {
  ProfilePair pair;
  SweepSettings settings;
  try {
    pair = build_pair(cfg);
    settings = sweep_settings(cfg);
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  if (verify && cfg.alphas.size() < 3) {
    err << "config error: verify needs an alpha ladder of at least 3 values\n";
    return kConfigError;
  }
  StudyReport report;
  try {
    report = run_sweep(pair, cfg.alphas, cfg.k, settings);
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
  report.config_echo = emit_config(cfg);
  verify_theorem(report, tolerances(cfg));
  print_summary(report, out);
  write_outputs(cfg, report, out);

  for (const auto& rec : report.records)
    if (!rec.converged) {
      err << "numerical failure: solver did not converge at alpha = " << rec.alpha << '\n';
      return kNumericalError;
    }
  if (!verify) return kOk;
  bool all = true;
  for (const auto& v : report.verdicts) all = all && v.status == VerdictStatus::Pass;
  out << (all ? "VERIFIED" : "NOT VERIFIED") << '\n';
  return all ? kOk : kFailure;
}

}  // namespace

int cmd_validate(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  ProfilePair pair;
  try {
    pair = build_pair(cfg);
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  bool ok = true;
  for (const ProfileSpec* spec : {&pair.a, &pair.v}) {
    const ValidationReport rep = validate_profile(*spec, default_sample_plan(*spec));
    out << to_string(spec->role) << " " << spec->label << ": " << (rep.passed() ? "PASS" : "FAIL")
        << '\n';
    for (const auto& c : rep.checks) print_ladder(out, c);
    for (const auto& a : rep.assumptions) out << "  assumption: " << a << '\n';
    if (!rep.passed()) {
      ok = false;
      for (const auto& c : rep.checks)
        if (!c.passed) err << to_string(spec->role) << " failed check: " << c.name << '\n';
    }
  }
  out << "sigma = " << format_number(pair.sigma) << '\n';
  return ok ? kOk : kFailure;
}

int cmd_model_spectrum(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  ProfilePair unit;
  double rescale = 1.0;
  Grid grid;
  std::string reasoning;
  SweepSettings settings;
  try {
    const ProfilePair pair = build_pair(cfg);
    rescale = pair.a.max_value * pair.v.max_value * pair.v.max_value;
    unit = normalized(pair);
    settings = sweep_settings(cfg);
    grid = choose_grid(cfg, unit, reasoning);
  } catch (const ParseError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  SolveSettings s = settings.model;
  s.k = cfg.k;
  const SolveMode mode = effective_model_mode(s, grid);
  s.mode = mode;
  std::vector<EigenPair> mu;
  std::vector<EigenPair> mu_fine;
  Grid fine;
  try {
    mu = model_spectrum(unit, grid, s);
    fine = build_grid(grid.dimension, 2 * grid.n_per_axis, grid.half_length);
    SolveSettings sf = s;
    sf.mode = effective_model_mode(settings.model, fine);
    mu_fine = model_spectrum(unit, fine, sf);
  } catch (const InvalidArgument& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  }
  out << "grid " << grid.id() << " (" << reasoning << "), mode " << to_string(mode) << '\n';
  std::vector<ModelRow> rows;
  out << std::setprecision(15);
  for (std::size_t i = 0; i < mu.size(); ++i) {
    const double m = rescale * mu[i].value;
    const double mf = rescale * mu_fine[i].value;
    const double rel = std::abs(m - mf) / std::abs(mf);
    const double digits = rel > 0.0 ? -std::log10(rel) : 16.0;
    out << "mu_" << i + 1 << " = " << m << "  residual " << std::setprecision(2) << std::scientific
        << rescale * mu[i].residual << std::defaultfloat << std::setprecision(15) << "  | "
        << fine.id() << ": " << mf << "  agreement " << std::setprecision(3) << digits
        << " digits" << std::setprecision(15) << '\n';
    rows.push_back({static_cast<int>(i) + 1, m, rescale * mu[i].residual, grid.n_per_axis,
                    grid.half_length, std::string(to_string(mode))});
  }
  write_file_atomic(output_path(cfg, "_model.csv"), model_csv(rows));
  out << "wrote " << output_path(cfg, "_model.csv") << '\n';
  return kOk;
}

int cmd_sweep(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return sweep_common(cfg, out, err, false);
}

int cmd_verify(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  return sweep_common(cfg, out, err, true);
}

int cmd_report(const RunConfig& cfg, std::ostream& out, std::ostream& err) {
  const std::string path = output_path(cfg, "_report.json");
  std::ifstream in(path);
  if (!in) {
    err << "config error: no report at " << path << " (run sweep or verify first)\n";
    return kConfigError;
  }
  StudyReport r;
  try {
    r = report_from_json(nlohmann::json::parse(in));
  } catch (const std::exception& e) {
    err << "config error: malformed report " << path << ": " << e.what() << '\n';
    return kConfigError;
  }
  print_summary(r, out);
  write_file_atomic(output_path(cfg, "_records.csv"), records_csv(r));
  write_file_atomic(output_path(cfg, "_plot.py"), plot_script(r, cfg.prefix + "_records.csv"));
  out << "regenerated " << output_path(cfg, "_{records.csv,plot.py}") << '\n';
  return kOk;
}

int run_command(const std::string& name, const std::string& config_path, const Overrides& o,
                std::ostream& out, std::ostream& err) {
  RunConfig cfg;
  try {
    cfg = load_config(config_path);
    apply_overrides(cfg, o);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kConfigError;
  }
  try {
    if (name == "validate") return cmd_validate(cfg, out, err);
    if (name == "model-spectrum") return cmd_model_spectrum(cfg, out, err);
    if (name == "sweep") return cmd_sweep(cfg, out, err);
    if (name == "verify") return cmd_verify(cfg, out, err);
    if (name == "report") return cmd_report(cfg, out, err);
  } catch (const Error& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kNumericalError;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kConfigError;
  }
  err << "unknown command " << name << '\n';
  return kConfigError;
}

}  // namespace topeig::cli

#include "report_io.hpp"

#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include <topeig/eigensolve.hpp>
#include <topeig/grid.hpp>

#include "config.hpp"

namespace topeig::cli {

using nlohmann::json;

namespace {

json num(double x) { return std::isfinite(x) ? json(x) : json(nullptr); }

double get_num(const json& j, const char* key) {
  if (!j.contains(key) || j.at(key).is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.at(key).get<double>();
}

json solver_json(const SolveSettings& s) {
  return {{"mode", std::string(to_string(s.mode))},
          {"k", s.k},
          {"tol", s.tol},
          {"max_iterations", s.max_iterations},
          {"krylov_dim", s.krylov_dim},
          {"seed", s.rng_seed},
          {"shift", s.shift},
          {"inner_max_iterations", s.inner_max_iterations},
          {"inner_tol", s.inner_tol}};
}

SolveSettings solver_from_json(const json& j) {
  SolveSettings s;
  s.mode = solve_mode_from_string(j.at("mode").get<std::string>());
  s.k = j.at("k").get<int>();
  s.tol = j.at("tol").get<double>();
  s.max_iterations = j.at("max_iterations").get<int>();
  s.krylov_dim = j.at("krylov_dim").get<int>();
  s.rng_seed = j.at("seed").get<std::uint64_t>();
  s.shift = j.at("shift").get<double>();
  s.inner_max_iterations = j.at("inner_max_iterations").get<int>();
  s.inner_tol = j.at("inner_tol").get<double>();
  return s;
}

json nums(const std::vector<double>& xs) {
  json a = json::array();
  for (double x : xs) a.push_back(num(x));
  return a;
}

std::vector<double> nums_from(const json& j) {
  std::vector<double> out;
  for (const auto& x : j)
    out.push_back(x.is_null() ? std::numeric_limits<double>::quiet_NaN() : x.get<double>());
  return out;
}

VerdictStatus status_from(const std::string& s) {
  if (s == "PASS") return VerdictStatus::Pass;
  if (s == "FAIL") return VerdictStatus::Fail;
  if (s == "INCONCLUSIVE") return VerdictStatus::Inconclusive;
  throw std::runtime_error("unknown verdict status " + s);
}

}  // namespace

json report_to_json(const StudyReport& r, std::uint64_t seed) {
  json j;
  j["schema"] = kReportSchema;
  j["version"] = r.version;
  j["config"] = r.config_echo;
  j["provenance"] = {{"seed", seed},
                     {"threads", r.threads},
                     {"grid",
                      {{"dimension", r.grid.dimension},
                       {"n", r.grid.n_per_axis},
                       {"l", r.grid.half_length},
                       {"id", r.grid.id()}}},
                     {"grid_reasoning", r.grid_reasoning},
                     {"top_solver", solver_json(r.top_settings)},
                     {"model_solver", solver_json(r.model_settings)},
                     {"records_csv_version", kRecordsCsvVersion}};
  auto profile = [](const ProfileSummary& p) {
    return json{{"label", p.label}, {"max", p.max_value}, {"degree", p.degree}};
  };
  j["pair"] = {{"a", profile(r.a)},
               {"v", profile(r.v)},
               {"dimension", r.dimension},
               {"sigma", r.sigma},
               {"rescale", r.rescale}};
  j["alphas"] = r.alphas;
  j["k"] = r.k;

  j["model_eigenvalues"] = json::array();
  for (const auto& m : r.model_eigenvalues)
    j["model_eigenvalues"].push_back({{"n", m.n}, {"mu", num(m.mu)}, {"residual", num(m.residual)}});

  j["records"] = json::array();
  for (const auto& rec : r.records) {
    const auto& l = rec.localization;
    j["records"].push_back(
        {{"alpha", rec.alpha},
         {"n", rec.n},
         {"lambda", num(rec.lambda)},
         {"scaled_gap", num(rec.scaled_gap)},
         {"residual", num(rec.residual)},
         {"grid_id", rec.grid_id},
         {"converged", rec.converged},
         {"note", rec.note},
         {"localization",
          {{"radii", nums(l.radii)},
           {"position_mass_outside", nums(l.position_mass_outside)},
           {"frequency_mass_outside", nums(l.frequency_mass_outside)},
           {"k_form", num(l.k_form)},
           {"s_form", num(l.s_form)},
           {"identity_residual", num(l.identity_residual)},
           {"c_hat_frequency", nums(l.c_hat_frequency)},
           {"c_hat_position", nums(l.c_hat_position)}}}});
  }

  j["extrapolations"] = json::array();
  for (const auto& e : r.extrapolations)
    j["extrapolations"].push_back({{"n", e.n},
                                   {"limit", num(e.limit)},
                                   {"rate", num(e.rate)},
                                   {"fit_residual", num(e.fit_residual)},
                                   {"degenerate", e.degenerate},
                                   {"note", e.note}});

  j["verdicts"] = json::array();
  for (const auto& v : r.verdicts) {
    json refs = json::array();
    for (std::size_t i = 0; i < r.records.size(); ++i)
      if (r.records[i].n == v.n) refs.push_back(i);
    j["verdicts"].push_back({{"n", v.n},
                             {"status", std::string(to_string(v.status))},
                             {"mu", num(v.mu)},
                             {"final_gap", num(v.final_gap)},
                             {"final_rel_error", num(v.final_rel_error)},
                             {"extrap_limit", num(v.extrap_limit)},
                             {"extrap_rel_error", num(v.extrap_rel_error)},
                             {"final_ok", v.final_ok},
                             {"extrap_ok", v.extrap_ok},
                             {"monotone_ok", v.monotone_ok},
                             {"upper_bound_ok", v.upper_bound_ok},
                             {"tolerances",
                              {{"rel_final", v.tolerances.rel_final},
                               {"rel_extrap", v.tolerances.rel_extrap},
                               {"strict", v.tolerances.strict}}},
                             {"records", refs},
                             {"reasons", v.reasons}});
  }
  return j;
}

StudyReport report_from_json(const json& j) {
  if (j.value("schema", "") != kReportSchema)
    throw std::runtime_error("not a topeig report (schema mismatch)");
  StudyReport r;
  r.version = j.at("version").get<std::string>();
  r.config_echo = j.at("config").get<std::string>();
  const auto& p = j.at("provenance");
  r.threads = p.at("threads").get<int>();
  const auto& g = p.at("grid");
  r.grid.dimension = g.at("dimension").get<int>();
  r.grid.n_per_axis = g.at("n").get<int>();
  r.grid.half_length = g.at("l").get<double>();
  r.grid_reasoning = p.at("grid_reasoning").get<std::string>();
  r.top_settings = solver_from_json(p.at("top_solver"));
  r.model_settings = solver_from_json(p.at("model_solver"));
  auto profile = [](const json& x) {
    return ProfileSummary{x.at("label").get<std::string>(), x.at("max").get<double>(),
                          x.at("degree").get<double>()};
  };
  const auto& pr = j.at("pair");
  r.a = profile(pr.at("a"));
  r.v = profile(pr.at("v"));
  r.dimension = pr.at("dimension").get<int>();
  r.sigma = pr.at("sigma").get<double>();
  r.rescale = pr.at("rescale").get<double>();
  r.alphas = j.at("alphas").get<std::vector<double>>();
  r.k = j.at("k").get<int>();
  for (const auto& m : j.at("model_eigenvalues"))
    r.model_eigenvalues.push_back({m.at("n").get<int>(), get_num(m, "mu"), get_num(m, "residual")});
  for (const auto& x : j.at("records")) {
    SweepRecord rec;
    rec.alpha = x.at("alpha").get<double>();
    rec.n = x.at("n").get<int>();
    rec.lambda = get_num(x, "lambda");
    rec.scaled_gap = get_num(x, "scaled_gap");
    rec.residual = get_num(x, "residual");
    rec.grid_id = x.at("grid_id").get<std::string>();
    rec.converged = x.at("converged").get<bool>();
    rec.note = x.at("note").get<std::string>();
    const auto& l = x.at("localization");
    rec.localization.radii = nums_from(l.at("radii"));
    rec.localization.position_mass_outside = nums_from(l.at("position_mass_outside"));
    rec.localization.frequency_mass_outside = nums_from(l.at("frequency_mass_outside"));
    rec.localization.k_form = get_num(l, "k_form");
    rec.localization.s_form = get_num(l, "s_form");
    rec.localization.identity_residual = get_num(l, "identity_residual");
    rec.localization.c_hat_frequency = nums_from(l.at("c_hat_frequency"));
    rec.localization.c_hat_position = nums_from(l.at("c_hat_position"));
    r.records.push_back(std::move(rec));
  }
  for (const auto& x : j.at("extrapolations")) {
    Extrapolation e;
    e.n = x.at("n").get<int>();
    e.limit = get_num(x, "limit");
    e.rate = get_num(x, "rate");
    e.fit_residual = get_num(x, "fit_residual");
    e.degenerate = x.at("degenerate").get<bool>();
    e.note = x.at("note").get<std::string>();
    r.extrapolations.push_back(e);
  }
  for (const auto& x : j.at("verdicts")) {
    Verdict v;
    v.n = x.at("n").get<int>();
    v.status = status_from(x.at("status").get<std::string>());
    v.mu = get_num(x, "mu");
    v.final_gap = get_num(x, "final_gap");
    v.final_rel_error = get_num(x, "final_rel_error");
    v.extrap_limit = get_num(x, "extrap_limit");
    v.extrap_rel_error = get_num(x, "extrap_rel_error");
    v.final_ok = x.at("final_ok").get<bool>();
    v.extrap_ok = x.at("extrap_ok").get<bool>();
    v.monotone_ok = x.at("monotone_ok").get<bool>();
    v.upper_bound_ok = x.at("upper_bound_ok").get<bool>();
    const auto& t = x.at("tolerances");
    v.tolerances = {t.at("rel_final").get<double>(), t.at("rel_extrap").get<double>(),
                    t.at("strict").get<bool>()};
    v.reasons = x.at("reasons").get<std::vector<std::string>>();
    r.verdicts.push_back(std::move(v));
  }
  return r;
}

std::string records_csv(const StudyReport& r) {
  std::vector<double> radii;
  if (!r.records.empty()) radii = r.records.front().localization.radii;
  std::ostringstream os;
  os << "alpha,n,lambda,scaled_gap,residual,k_form,s_form,identity_residual";
  for (double R : radii) os << ",mass_pos_R" << format_number(R);
  for (double R : radii) os << ",mass_freq_R" << format_number(R);
  os << ",converged,grid_id\n";
  auto cell = [](double x) { return std::isfinite(x) ? format_number(x) : std::string("nan"); };
  for (const auto& rec : r.records) {
    const auto& l = rec.localization;
    os << cell(rec.alpha) << ',' << rec.n << ',' << cell(rec.lambda) << ',' << cell(rec.scaled_gap)
       << ',' << cell(rec.residual) << ',' << cell(l.k_form) << ',' << cell(l.s_form) << ','
       << cell(l.identity_residual);
    for (std::size_t i = 0; i < radii.size(); ++i)
      os << ',' << (i < l.position_mass_outside.size() ? cell(l.position_mass_outside[i]) : "nan");
    for (std::size_t i = 0; i < radii.size(); ++i)
      os << ',' << (i < l.frequency_mass_outside.size() ? cell(l.frequency_mass_outside[i]) : "nan");
    os << ',' << (rec.converged ? 1 : 0) << ',' << rec.grid_id << '\n';
  }
  return os.str();
}

std::string model_csv(const std::vector<ModelRow>& rows) {
  std::ostringstream os;
  os << "n,mu,residual,N,L,mode\n";
  for (const auto& m : rows)
    os << m.n << ',' << format_number(m.mu) << ',' << format_number(m.residual) << ','
       << m.grid_n << ',' << format_number(m.grid_l) << ',' << m.mode << '\n';
  return os.str();
}

std::string plot_script(const StudyReport& r, const std::string& csv_name) {
  std::ostringstream os;
  os << "#!/usr/bin/env python3\n"
     << "# Generated by topeig " << r.version << ". Usage: python3 <this file>\n"
     << "import csv, os\n"
     << "import matplotlib\n"
     << "matplotlib.use('Agg')\n"
     << "import matplotlib.pyplot as plt\n\n"
     << "here = os.path.dirname(os.path.abspath(__file__))\n"
     << "mu = {";
  for (std::size_t i = 0; i < r.model_eigenvalues.size(); ++i)
    os << (i ? ", " : "") << r.model_eigenvalues[i].n << ": "
       << format_number(r.model_eigenvalues[i].mu);
  os << "}\n"
     << "series = {}\n"
     << "with open(os.path.join(here, '" << csv_name << "')) as f:\n"
     << "    for row in csv.DictReader(f):\n"
     << "        if row['converged'] != '1':\n"
     << "            continue\n"
     << "        series.setdefault(int(row['n']), []).append((float(row['alpha']), float(row['scaled_gap'])))\n"
     << "fig, ax = plt.subplots(figsize=(6, 4))\n"
     << "for n, pts in sorted(series.items()):\n"
     << "    pts.sort()\n"
     << "    line, = ax.plot([p[0] for p in pts], [p[1] for p in pts], 'o-', label=f'g_{n}')\n"
     << "    if n in mu:\n"
     << "        ax.axhline(mu[n], color=line.get_color(), ls='--', lw=0.8)\n"
     << "ax.set_xscale('log')\n"
     << "ax.set_xlabel('alpha')\n"
     << "ax.set_ylabel('scaled gap')\n"
     << "ax.set_title('sigma = " << format_number(r.sigma) << ", grid " << r.grid.id() << "')\n"
     << "ax.legend()\n"
     << "fig.tight_layout()\n"
     << "fig.savefig(os.path.join(here, '" << csv_name.substr(0, csv_name.rfind('.'))
     << ".png'), dpi=150)\n";
  return os.str();
}

void write_file_atomic(const std::string& path, const std::string& content) {
  namespace fs = std::filesystem;
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = fs::path(path + ".tmp");
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write " + tmp.string());
    out << content;
    out.flush();
    if (!out) throw std::runtime_error("write failed: " + tmp.string());
  }
  fs::rename(tmp, target);
}

}  // namespace topeig::cli

#include "config.hpp"

#include <charconv>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include <topeig/eigensolve.hpp>
#include <topeig/errors.hpp>
#include <topeig/grid.hpp>

namespace topeig::cli {

namespace pt = boost::property_tree;

std::string format_number(double x) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, res.ptr);
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  double x = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    throw ConfigError(key + ": not a number: '" + s + "'");
  return x;
}

long long to_int(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  long long x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    throw ConfigError(key + ": not an integer: '" + s + "'");
  return x;
}

std::uint64_t to_u64(const std::string& key, const std::string& raw) {
  std::string s = trim(raw);
  int base = 10;
  if (s.size() > 2 && s[0] == '0' && (s[1] == 'x' || s[1] == 'X')) {
    s = s.substr(2);
    base = 16;
  }
  std::uint64_t x = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), x, base);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size() || s.empty())
    throw ConfigError(key + ": not an unsigned integer: '" + raw + "'");
  return x;
}

bool to_bool(const std::string& key, const std::string& raw) {
  const std::string s = trim(raw);
  if (s == "true" || s == "yes" || s == "1") return true;
  if (s == "false" || s == "no" || s == "0") return false;
  throw ConfigError(key + ": expected true or false, got '" + s + "'");
}

std::vector<double> to_list(const std::string& key, const std::string& raw) {
  std::vector<double> out;
  std::stringstream ss(raw);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(to_double(key, item));
  return out;
}

std::string join(const std::vector<double>& xs) {
  std::string s;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) s += ", ";
    s += format_number(xs[i]);
  }
  return s;
}

const std::map<std::string, std::set<std::string>>& schema() {
  static const std::map<std::string, std::set<std::string>> s = {
      {"a", {"catalog", "params", "expr", "principal", "max", "degree"}},
      {"v", {"catalog", "params", "expr", "principal", "max", "degree"}},
      {"run", {"dimension", "alphas", "k", "radii", "threads", "emit_eigenfunctions"}},
      {"grid", {"mode", "n", "l"}},
      {"solver", {"tol", "max_iter", "seed", "mode", "model_mode"}},
      {"tolerances", {"rel_final", "rel_extrap", "strict"}},
      {"output", {"dir", "prefix", "emit_eigenfunctions"}},
  };
  return s;
}

ProfileConfig parse_profile(const pt::ptree& sec, const std::string& name) {
  ProfileConfig p;
  auto get = [&](const char* key) -> std::optional<std::string> {
    if (auto v = sec.get_optional<std::string>(key)) return trim(*v);
    return std::nullopt;
  };
  const auto catalog = get("catalog");
  const auto expr = get("expr");
  if (catalog && expr) throw ConfigError("[" + name + "]: give either catalog or expr, not both");
  if (!catalog && !expr) throw ConfigError("[" + name + "]: missing catalog or expr");
  if (catalog) {
    p.catalog = *catalog;
    if (p.catalog.empty()) throw ConfigError("[" + name + "] catalog: empty");
    if (auto params = get("params")) p.params = to_list(name + ".params", *params);
    for (const char* k : {"principal", "max", "degree"})
      if (get(k)) throw ConfigError("[" + name + "] " + k + ": only valid with expr");
  } else {
    p.expr = *expr;
    const auto principal = get("principal");
    const auto degree = get("degree");
    if (!principal || !degree)
      throw ConfigError("[" + name + "]: expr requires principal and degree");
    p.principal = *principal;
    p.degree = to_double(name + ".degree", *degree);
    if (!(p.degree > 0.0)) throw ConfigError("[" + name + "] degree: must be positive");
    if (auto m = get("max")) p.max_value = to_double(name + ".max", *m);
    if (!(p.max_value > 0.0)) throw ConfigError("[" + name + "] max: must be positive");
    if (get("params")) throw ConfigError("[" + name + "] params: only valid with catalog");
  }
  return p;
}

void emit_profile(std::ostringstream& os, const char* name, const ProfileConfig& p) {
  os << "[" << name << "]\n";
  if (!p.catalog.empty()) {
    os << "catalog = " << p.catalog << "\n";
    if (!p.params.empty()) os << "params = " << join(p.params) << "\n";
  } else {
    os << "expr = " << p.expr << "\n";
    os << "principal = " << p.principal << "\n";
    os << "max = " << format_number(p.max_value) << "\n";
    os << "degree = " << format_number(p.degree) << "\n";
  }
  os << "\n";
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  pt::ptree tree;
  try {
    std::istringstream is(text);
    pt::read_ini(is, tree);
  } catch (const pt::ini_parser_error& e) {
    throw ConfigError(std::string("config syntax: ") + e.what());
  }
  for (const auto& [section, body] : tree) {
    const auto it = schema().find(section);
    if (it == schema().end()) {
      if (!body.data().empty()) throw ConfigError("key outside a section: " + section);
      throw ConfigError("unknown section [" + section + "]");
    }
    for (const auto& [key, value] : body) {
      if (!it->second.count(key)) throw ConfigError("unknown key " + section + "." + key);
      (void)value;
    }
  }

  RunConfig c;
  auto section = [&](const char* name) -> const pt::ptree& {
    static const pt::ptree empty;
    const auto s = tree.get_child_optional(name);
    return s ? *s : empty;
  };
  auto opt = [&](const char* sec, const char* key) -> std::optional<std::string> {
    if (auto v = section(sec).get_optional<std::string>(key)) return trim(*v);
    return std::nullopt;
  };

  if (!tree.get_child_optional("a")) throw ConfigError("missing section [a]");
  if (!tree.get_child_optional("v")) throw ConfigError("missing section [v]");
  c.a = parse_profile(section("a"), "a");
  c.v = parse_profile(section("v"), "v");

  if (auto s = opt("run", "dimension")) c.dimension = static_cast<int>(to_int("run.dimension", *s));
  if (c.dimension < 1 || c.dimension > 3) throw ConfigError("run.dimension: must be 1, 2 or 3");
  if (auto s = opt("run", "alphas")) c.alphas = to_list("run.alphas", *s);
  else throw ConfigError("run.alphas: missing");
  if (c.alphas.empty()) throw ConfigError("run.alphas: empty ladder");
  for (std::size_t i = 0; i < c.alphas.size(); ++i) {
    if (!(c.alphas[i] > 0.0 && c.alphas[i] <= 1.0))
      throw ConfigError("run.alphas: values must lie in (0, 1]");
    if (i > 0 && !(c.alphas[i] < c.alphas[i - 1]))
      throw ConfigError("run.alphas: ladder must be strictly decreasing");
  }
  if (auto s = opt("run", "k")) {
    const long long k = to_int("run.k", *s);
    if (k < 1 || k > 64) throw ConfigError("run.k: must be in 1..64");
    c.k = static_cast<int>(k);
  }
  if (auto s = opt("run", "radii")) c.radii = to_list("run.radii", *s);
  for (double r : c.radii)
    if (!(r > 0.0)) throw ConfigError("run.radii: values must be positive");
  if (auto s = opt("run", "threads")) {
    const long long t = to_int("run.threads", *s);
    if (t < 1 || t > 256) throw ConfigError("run.threads: must be in 1..256");
    c.threads = static_cast<int>(t);
  }
  if (auto s = opt("run", "emit_eigenfunctions"))
    c.emit_eigenfunctions = to_bool("run.emit_eigenfunctions", *s);
  if (auto s = opt("output", "emit_eigenfunctions"))
    c.emit_eigenfunctions = to_bool("output.emit_eigenfunctions", *s);

  const std::string gmode = opt("grid", "mode").value_or("auto");
  if (gmode == "auto") {
    c.grid_auto = true;
    if (opt("grid", "n") || opt("grid", "l"))
      throw ConfigError("grid: n and l require mode = fixed");
  } else if (gmode == "fixed") {
    c.grid_auto = false;
    const auto n = opt("grid", "n");
    const auto l = opt("grid", "l");
    if (!n || !l) throw ConfigError("grid: mode = fixed requires n and l");
    const long long nn = to_int("grid.n", *n);
    if (nn < 8 || nn % 2 != 0 || nn > (1 << 20))
      throw ConfigError("grid.n: must be even and in 8..2^20");
    c.grid_n = static_cast<int>(nn);
    c.grid_l = to_double("grid.l", *l);
    if (!(c.grid_l > 0.0)) throw ConfigError("grid.l: must be positive");
  } else {
    throw ConfigError("grid.mode: expected auto or fixed, got '" + gmode + "'");
  }

  if (auto s = opt("solver", "tol")) c.tol = to_double("solver.tol", *s);
  if (!(c.tol >= 1e-15 && c.tol <= 1e-3)) throw ConfigError("solver.tol: must be in [1e-15, 1e-3]");
  if (auto s = opt("solver", "max_iter")) {
    const long long m = to_int("solver.max_iter", *s);
    if (m < 1 || m > 1000000) throw ConfigError("solver.max_iter: must be in 1..1e6");
    c.max_iter = static_cast<int>(m);
  }
  if (auto s = opt("solver", "seed")) c.seed = to_u64("solver.seed", *s);
  if (auto s = opt("solver", "mode")) c.mode = *s;
  if (c.mode != "lanczos" && c.mode != "dense")
    throw ConfigError("solver.mode: expected lanczos or dense");
  if (auto s = opt("solver", "model_mode")) c.model_mode = *s;
  if (c.model_mode != "auto" && c.model_mode != "dense" && c.model_mode != "shift-invert")
    throw ConfigError("solver.model_mode: expected auto, dense or shift-invert");

  if (auto s = opt("tolerances", "rel_final")) c.rel_final = to_double("tolerances.rel_final", *s);
  if (auto s = opt("tolerances", "rel_extrap")) c.rel_extrap = to_double("tolerances.rel_extrap", *s);
  if (!(c.rel_final > 0.0) || !(c.rel_extrap > 0.0))
    throw ConfigError("tolerances: rel_final and rel_extrap must be positive");
  if (auto s = opt("tolerances", "strict")) c.strict = to_bool("tolerances.strict", *s);

  if (auto s = opt("output", "dir")) c.out_dir = *s;
  if (auto s = opt("output", "prefix")) c.prefix = *s;
  if (c.out_dir.empty() || c.prefix.empty()) throw ConfigError("output: dir and prefix must be non-empty");
  if (c.prefix.find('/') != std::string::npos) throw ConfigError("output.prefix: must not contain '/'");
  return c;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

std::string emit_config(const RunConfig& c) {
  std::ostringstream os;
  emit_profile(os, "a", c.a);
  emit_profile(os, "v", c.v);
  os << "[run]\n"
     << "dimension = " << c.dimension << "\n"
     << "alphas = " << join(c.alphas) << "\n"
     << "k = " << c.k << "\n"
     << "radii = " << join(c.radii) << "\n"
     << "threads = " << c.threads << "\n\n";
  os << "[grid]\n";
  if (c.grid_auto) {
    os << "mode = auto\n\n";
  } else {
    os << "mode = fixed\n"
       << "n = " << c.grid_n << "\n"
       << "l = " << format_number(c.grid_l) << "\n\n";
  }
  os << "[solver]\n"
     << "tol = " << format_number(c.tol) << "\n"
     << "max_iter = " << c.max_iter << "\n"
     << "seed = " << c.seed << "\n"
     << "mode = " << c.mode << "\n"
     << "model_mode = " << c.model_mode << "\n\n";
  os << "[tolerances]\n"
     << "rel_final = " << format_number(c.rel_final) << "\n"
     << "rel_extrap = " << format_number(c.rel_extrap) << "\n"
     << "strict = " << (c.strict ? "true" : "false") << "\n\n";
  os << "[output]\n"
     << "dir = " << c.out_dir << "\n"
     << "prefix = " << c.prefix << "\n"
     << "emit_eigenfunctions = " << (c.emit_eigenfunctions ? "true" : "false") << "\n";
  return os.str();
}

std::string normalize_config(const std::string& text) { return emit_config(parse_config(text)); }

ProfileSpec build_profile(const ProfileConfig& p, int dimension, Role role) {
  if (!p.catalog.empty()) return make_catalog_profile(p.catalog, p.params, dimension, role);
  return make_expression_profile(p.expr, p.principal, p.max_value, p.degree, dimension, role);
}

ProfilePair build_pair(const RunConfig& cfg) {
  return make_profile_pair(build_profile(cfg.a, cfg.dimension, Role::SymbolA),
                           build_profile(cfg.v, cfg.dimension, Role::WeightV));
}

SweepSettings sweep_settings(const RunConfig& cfg) {
  SweepSettings s;
  s.top.k = cfg.k;
  s.top.tol = cfg.tol;
  s.top.max_iterations = cfg.max_iter;
  s.top.rng_seed = cfg.seed;
  s.top.mode = solve_mode_from_string(cfg.mode);
  s.model = s.top;
  s.model.mode = cfg.model_mode == "auto" ? SolveMode::LanczosTop
                                          : solve_mode_from_string(cfg.model_mode);
  if (!cfg.grid_auto) s.grid = build_grid(cfg.dimension, cfg.grid_n, cfg.grid_l);
  s.radii = cfg.radii;
  s.threads = cfg.threads;
  s.keep_eigenvectors = cfg.emit_eigenfunctions;
  return s;
}

Tolerances tolerances(const RunConfig& cfg) {
  Tolerances t;
  t.rel_final = cfg.rel_final;
  t.rel_extrap = cfg.rel_extrap;
  t.strict = cfg.strict;
  return t;
}

}  // namespace topeig::cli

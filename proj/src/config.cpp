#include "fbq/config.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "fbq/eigen_index.hpp"

namespace fbq {

std::size_t levenshtein(const std::string& a, const std::string& b) {
  std::vector<std::size_t> row(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) row[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    std::size_t diag = row[0];
    row[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      const std::size_t up = row[j];
      row[j] = std::min({row[j] + 1, row[j - 1] + 1, diag + (a[i - 1] == b[j - 1] ? 0 : 1)});
      diag = up;
    }
  }
  return row[b.size()];
}

namespace {

std::string trim(std::string s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> words(const std::string& s) {
  std::istringstream in(s);
  std::vector<std::string> out;
  for (std::string w; in >> w;) out.push_back(w);
  return out;
}

[[noreturn]] void fail(const std::string& key, const std::string& what) { throw ConfigError(key + ": " + what); }

double to_double(const std::string& key, const std::string& text) {
  double v = 0.0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(key, "expected a number, got '" + text + "'");
  return v;
}

long long to_integer(const std::string& key, const std::string& text) {
  long long v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(key, "expected an integer, got '" + text + "'");
  return v;
}

int to_int(const std::string& key, const std::string& text) {
  const long long v = to_integer(key, text);
  if (v < INT32_MIN || v > INT32_MAX) fail(key, "integer out of range");
  return static_cast<int>(v);
}

std::uint64_t to_u64(const std::string& key, const std::string& text) {
  std::uint64_t v = 0;
  const auto* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end) fail(key, "expected an unsigned 64-bit integer, got '" + text + "'");
  return v;
}

bool to_bool(const std::string& key, const std::string& text) {
  if (text == "true" || text == "1" || text == "yes") return true;
  if (text == "false" || text == "0" || text == "no") return false;
  fail(key, "expected true or false, got '" + text + "'");
}

ForcingMode to_mode(const std::string& key, const std::string& text) {
  const auto w = words(text);
  if (w.size() != 4) fail(key, "expected 'k1 k2 amplitude sin|cos', got '" + text + "'");
  ForcingMode m;
  m.k1 = to_int(key, w[0]);
  m.k2 = to_int(key, w[1]);
  m.amplitude = to_double(key, w[2]);
  if (w[3] == "sin")
    m.phase = Phase::Sin;
  else if (w[3] == "cos")
    m.phase = Phase::Cos;
  else
    fail(key, "phase must be sin or cos, got '" + w[3] + "'");
  return m;
}

using Setter = std::function<void(RunConfig&, const std::string& key, const std::string& value)>;

const std::map<std::string, Setter>& setters() {
  static const std::map<std::string, Setter> table = [] {
    std::map<std::string, Setter> t;
    auto real = [&t](const std::string& k, double RunConfig::*field) {
      t[k] = [field](RunConfig& c, const std::string& key, const std::string& v) { c.*field = to_double(key, v); };
    };
    auto integer = [&t](const std::string& k, int RunConfig::*field) {
      t[k] = [field](RunConfig& c, const std::string& key, const std::string& v) { c.*field = to_int(key, v); };
    };
    t["grid.n"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.n = to_int(k, v); };
    t["physics.nu"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.params.nu = to_double(k, v); };
    t["physics.kappa"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.params.kappa = to_double(k, v); };
    t["physics.alpha"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.params.alpha = to_double(k, v); };
    t["physics.beta"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.params.beta = to_double(k, v); };
    t["physics.allow_out_of_range_exponents"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.params.allow_out_of_range_exponents = to_bool(k, v);
    };
    t["forcing.mode"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.forcing.push_back(to_mode(k, v)); };
    t["integrator.dt"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.integrator.dt = to_double(k, v); };
    t["integrator.scheme"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      if (v == "if_rk4" || v == "rk4")
        c.integrator.scheme = Scheme::IfRk4;
      else if (v == "if_rk2" || v == "rk2")
        c.integrator.scheme = Scheme::IfRk2;
      else
        fail(k, "scheme must be if_rk4 or if_rk2, got '" + v + "'");
    };
    t["integrator.cfl_safety"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.integrator.cfl_safety = to_double(k, v);
    };
    t["integrator.t_end"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.integrator.t_end = to_double(k, v); };
    t["integrator.recheck_interval"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.integrator.recheck_interval = to_int(k, v);
    };
    auto exp_real = [&t](const std::string& k, double ExperimentConfig::*field) {
      t[k] = [field](RunConfig& c, const std::string& key, const std::string& v) { c.experiment.*field = to_double(key, v); };
    };
    exp_real("experiment.spin_up", &ExperimentConfig::spin_up);
    exp_real("experiment.horizon", &ExperimentConfig::horizon);
    exp_real("experiment.epsilon", &ExperimentConfig::epsilon);
    exp_real("experiment.initial_amplitude", &ExperimentConfig::initial_amplitude);
    exp_real("experiment.s1", &ExperimentConfig::s1);
    exp_real("experiment.s2", &ExperimentConfig::s2);
    exp_real("experiment.sync_tolerance", &ExperimentConfig::sync_tolerance);
    t["experiment.pairs"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.experiment.pairs = to_int(k, v); };
    t["experiment.m_values"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.experiment.m_values.clear();
      for (const auto& w : words(v)) c.experiment.m_values.push_back(to_int(k, w));
    };
    auto ineq_real = [&t](const std::string& k, double InequalityConfig::*field) {
      t[k] = [field](RunConfig& c, const std::string& key, const std::string& v) { c.inequalities.*field = to_double(key, v); };
    };
    auto ineq_int = [&t](const std::string& k, int InequalityConfig::*field) {
      t[k] = [field](RunConfig& c, const std::string& key, const std::string& v) { c.inequalities.*field = to_int(key, v); };
    };
    t["inequalities.select"] = [](RunConfig& c, const std::string&, const std::string& v) { c.inequalities.select = words(v); };
    ineq_int("inequalities.samples", &InequalityConfig::samples);
    ineq_int("inequalities.pair_samples", &InequalityConfig::pair_samples);
    ineq_real("inequalities.decay", &InequalityConfig::decay);
    ineq_real("inequalities.s1", &InequalityConfig::s1);
    ineq_real("inequalities.s", &InequalityConfig::s);
    ineq_real("inequalities.s2", &InequalityConfig::s2);
    ineq_real("inequalities.sobolev_s", &InequalityConfig::sobolev_s);
    ineq_real("inequalities.product_s", &InequalityConfig::product_s);
    ineq_int("inequalities.gronwall_instances", &InequalityConfig::gronwall_instances);
    ineq_int("inequalities.gronwall_cells", &InequalityConfig::gronwall_cells);
    ineq_int("inequalities.gronwall_window", &InequalityConfig::gronwall_window);
    ineq_real("inequalities.gronwall_cell", &InequalityConfig::gronwall_cell);
    t["run.command"] = [](RunConfig& c, const std::string&, const std::string& v) { c.command = v; };
    t["run.output"] = [](RunConfig& c, const std::string&, const std::string& v) { c.output_dir = v; };
    t["run.seed"] = [](RunConfig& c, const std::string& k, const std::string& v) { c.seed = to_u64(k, v); };
    integer("run.threads", &RunConfig::threads);
    integer("run.sample_every", &RunConfig::sample_every);
    integer("run.digits", &RunConfig::digits);
    real("run.c_free", &RunConfig::c_free);
    t["run.rho_m"] = [](RunConfig& c, const std::string& k, const std::string& v) {
      c.rho_m.clear();
      for (const auto& w : words(v)) c.rho_m.push_back(to_int(k, w));
    };
    return t;
  }();
  return table;
}

// Long-form spellings accepted for the physical parameters.
const std::map<std::string, std::string>& aliases() {
  static const std::map<std::string, std::string> a = {{"physics.viscosity", "physics.nu"},
                                                       {"physics.diffusivity", "physics.kappa"}};
  return a;
}

std::string suggestion(const std::string& key) {
  std::string best;
  std::size_t best_d = std::string::npos;
  const auto dot = key.find('.');
  const std::string leaf = dot == std::string::npos ? key : key.substr(dot + 1);
  std::vector<std::string> candidates;
  for (const auto& [known, _] : setters()) candidates.push_back(known);
  for (const auto& [alias, _] : aliases()) candidates.push_back(alias);
  for (const auto& known : candidates) {
    const std::string known_leaf = known.substr(known.find('.') + 1);
    const std::size_t d = std::min(levenshtein(key, known), levenshtein(leaf, known_leaf));
    if (d < best_d) {
      best_d = d;
      best = known;
    }
  }
  if (best_d <= std::max<std::size_t>(2, leaf.size() / 3)) return " (did you mean '" + best + "'?)";
  return {};
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  RunConfig c;
  std::set<std::string> seen;
  std::string section;
  std::istringstream in(text);
  int line_no = 0;
  for (std::string raw; std::getline(in, raw);) {
    ++line_no;
    const auto hash = raw.find_first_of("#;");
    std::string line = trim(hash == std::string::npos ? raw : raw.substr(0, hash));
    if (line.empty()) continue;
    const std::string where = "line " + std::to_string(line_no);
    if (line.front() == '[') {
      if (line.back() != ']') throw ConfigError(where + ": malformed section header '" + line + "'");
      section = trim(line.substr(1, line.size() - 2));
      static const std::set<std::string> sections = {"grid", "physics", "forcing", "integrator",
                                                     "experiment", "inequalities", "run"};
      if (!sections.count(section)) {
        std::string hint;
        for (const auto& s : sections)
          if (levenshtein(section, s) <= 2) hint = " (did you mean '[" + s + "]'?)";
        throw ConfigError(where + ": unknown section [" + section + "]" + hint);
      }
      continue;
    }
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(where + ": expected key = value, got '" + line + "'");
    if (section.empty()) throw ConfigError(where + ": key outside any section");
    std::string key = section + "." + trim(line.substr(0, eq));
    if (auto a = aliases().find(key); a != aliases().end()) key = a->second;
    const std::string value = trim(line.substr(eq + 1));
    const auto it = setters().find(key);
    if (it == setters().end()) throw ConfigError(where + ": unknown key '" + key + "'" + suggestion(key));
    if (key != "forcing.mode" && !seen.insert(key).second) throw ConfigError(where + ": duplicate key '" + key + "'");
    if (value.empty()) throw ConfigError(where + ": " + key + ": missing value");
    it->second(c, key, value);
  }
  for (const char* required : {"grid.n", "physics.nu", "physics.kappa", "physics.alpha", "physics.beta"})
    if (!seen.count(required)) throw ConfigError(std::string("missing required key '") + required + "'");
  return c;
}

void RunConfig::finalize() {
  auto guard = [](const std::string& scope, auto&& fn) {
    try {
      fn();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(scope + ": " + e.what());
    } catch (const std::out_of_range& e) {
      throw ConfigError(scope + ": " + e.what());
    }
  };
  if (command.empty()) throw ConfigError("no subcommand given");
  if (std::find(known_commands().begin(), known_commands().end(), command) == known_commands().end())
    throw ConfigError("unknown subcommand '" + command + "'");
  if (digits < 1 || digits > 15) throw ConfigError("run.digits: must lie in [1, 15]");
  if (command == "gauss") return;  // needs nothing else
  GridSpec grid{};
  guard("grid.n", [&] { grid = make_grid(n); });
  guard("physics", [&] { params.validate(); });
  guard("integrator", [&] { integrator.validate(); });
  guard("forcing", [&] { make_forcing(grid, forcing, params, experiment.s1); });
  if (threads < 1) throw ConfigError("run.threads: must be >= 1");
  if (sample_every < 1) throw ConfigError("run.sample_every: must be >= 1");
  if (!(c_free > 0.0) || !std::isfinite(c_free)) throw ConfigError("run.c_free: must be positive and finite");

  experiment.n = n;
  experiment.params = params;
  experiment.forcing = forcing;
  experiment.integrator = integrator;
  experiment.threads = threads;
  if (seed) experiment.seed = *seed;

  const bool randomized = command == "simulate" || command == "squeeze" || command == "determine" || command == "inequalities";
  if (randomized && !seed) throw ConfigError("run.seed: a seed is required for '" + command + "' (set run.seed or pass --seed)");
  if (command == "squeeze" || command == "determine") {
    if (experiment.m_values.empty()) throw ConfigError("experiment.m_values: at least one m is required");
    const EigenIndex index(grid);
    guard("experiment", [&] { experiment.validate(index.size()); });
  }
  if (command == "bounds") {
    const EigenIndex index(grid);
    for (int m : rho_m)
      if (m < 1 || m > index.size())
        throw ConfigError("run.rho_m: m = " + std::to_string(m) + " outside [1, " + std::to_string(index.size()) + "]");
  }
  if (command == "inequalities") {
    static const std::set<std::string> names = {"poincare", "interpolation", "sobolev", "kato_ponce", "commutator",
                                                "uniform_gronwall"};
    for (const auto& s : inequalities.select)
      if (!names.count(s)) throw ConfigError("inequalities.select: unknown inequality '" + s + "'");
    const auto& q = inequalities;
    if (q.samples < 0 || q.pair_samples < 0 || q.gronwall_instances < 0)
      throw ConfigError("inequalities: sample counts must be >= 0");
    if (!(q.s1 <= q.s && q.s <= q.s2)) throw ConfigError("inequalities: need s1 <= s <= s2");
    if (!(q.sobolev_s > 0.0 && q.sobolev_s < 1.0)) throw ConfigError("inequalities.sobolev_s: must lie in (0, 1)");
    if (!(q.product_s > 0.0)) throw ConfigError("inequalities.product_s: must be > 0");
    if (q.gronwall_window < 1 || q.gronwall_window > q.gronwall_cells)
      throw ConfigError("inequalities.gronwall_window: must lie in [1, gronwall_cells]");
    if (!(q.gronwall_cell > 0.0)) throw ConfigError("inequalities.gronwall_cell: must be > 0");
  }
}

namespace {

std::string num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

template <class T>
std::string join(const std::vector<T>& v) {
  std::ostringstream os;
  for (std::size_t i = 0; i < v.size(); ++i) os << (i ? " " : "") << v[i];
  return os.str();
}

}  // namespace

std::string to_config_text(const RunConfig& c) {
  std::ostringstream o;
  o << "[grid]\nn = " << c.n << "\n\n";
  o << "[physics]\nnu = " << num(c.params.nu) << "\nkappa = " << num(c.params.kappa) << "\nalpha = " << num(c.params.alpha)
    << "\nbeta = " << num(c.params.beta)
    << "\nallow_out_of_range_exponents = " << (c.params.allow_out_of_range_exponents ? "true" : "false") << "\n\n";
  o << "[forcing]\n";
  for (const auto& m : c.forcing)
    o << "mode = " << m.k1 << " " << m.k2 << " " << num(m.amplitude) << " " << (m.phase == Phase::Sin ? "sin" : "cos") << "\n";
  o << "\n[integrator]\ndt = " << num(c.integrator.dt)
    << "\nscheme = " << (c.integrator.scheme == Scheme::IfRk4 ? "if_rk4" : "if_rk2")
    << "\ncfl_safety = " << num(c.integrator.cfl_safety) << "\nt_end = " << num(c.integrator.t_end)
    << "\nrecheck_interval = " << c.integrator.recheck_interval << "\n\n";
  const auto& e = c.experiment;
  o << "[experiment]\nspin_up = " << num(e.spin_up) << "\nhorizon = " << num(e.horizon) << "\nepsilon = " << num(e.epsilon)
    << "\ninitial_amplitude = " << num(e.initial_amplitude) << "\npairs = " << e.pairs << "\ns1 = " << num(e.s1)
    << "\ns2 = " << num(e.s2) << "\nsync_tolerance = " << num(e.sync_tolerance) << "\n";
  if (!e.m_values.empty()) o << "m_values = " << join(e.m_values) << "\n";
  const auto& q = c.inequalities;
  o << "\n[inequalities]\n";
  if (!q.select.empty()) o << "select = " << join(q.select) << "\n";
  o << "samples = " << q.samples << "\npair_samples = " << q.pair_samples << "\ndecay = " << num(q.decay)
    << "\ns1 = " << num(q.s1) << "\ns = " << num(q.s) << "\ns2 = " << num(q.s2) << "\nsobolev_s = " << num(q.sobolev_s)
    << "\nproduct_s = " << num(q.product_s) << "\ngronwall_instances = " << q.gronwall_instances
    << "\ngronwall_cells = " << q.gronwall_cells << "\ngronwall_window = " << q.gronwall_window
    << "\ngronwall_cell = " << num(q.gronwall_cell) << "\n\n";
  o << "[run]\n";
  if (!c.command.empty()) o << "command = " << c.command << "\n";
  if (c.seed) o << "seed = " << *c.seed << "\n";
  o << "threads = " << c.threads << "\nsample_every = " << c.sample_every << "\ndigits = " << c.digits
    << "\nc_free = " << num(c.c_free) << "\n";
  if (!c.rho_m.empty()) o << "rho_m = " << join(c.rho_m) << "\n";
  return o.str();
}

}  // namespace fbq

#include "fbq/run.hpp"

#include <openssl/evp.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <ostream>
#include <sstream>

#include "fbq/diagnostics.hpp"
#include "fbq/experiments.hpp"
#include "fbq/inequalities.hpp"
#include "fbq/spectrum_io.hpp"
#include "json_util.hpp"

namespace fbq {

using detail::json_number;
using nlohmann::json;

std::string sha256_hex(const std::string& bytes) {
  unsigned char digest[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  if (EVP_Digest(bytes.data(), bytes.size(), digest, &len, EVP_sha256(), nullptr) != 1)
    throw std::runtime_error("SHA-256 failed");
  static const char* hex = "0123456789abcdef";
  std::string out;
  for (unsigned int i = 0; i < len; ++i) {
    out += hex[digest[i] >> 4];
    out += hex[digest[i] & 15];
  }
  return out;
}

std::string manifest_text(const Artifacts& files) {
  std::string out;
  for (const auto& [name, content] : files) out += sha256_hex(content) + "  " + name + "\n";
  return out;
}

void write_artifacts(const std::string& directory, const Artifacts& files) {
  namespace fs = std::filesystem;
  fs::create_directories(directory);
  auto put = [&](const std::string& name, const std::string& content) {
    std::ofstream out(fs::path(directory) / name, std::ios::binary | std::ios::trunc);
    out.write(content.data(), static_cast<std::streamsize>(content.size()));
    if (!out) throw std::runtime_error("cannot write " + (fs::path(directory) / name).string());
  };
  for (const auto& [name, content] : files) put(name, content);
  put("MANIFEST", manifest_text(files));
}

std::string error_record(int exit_code, const std::string& kind, const std::string& message) {
  return json{{"status", "error"}, {"exit_code", exit_code}, {"kind", kind}, {"message", message}}.dump();
}

namespace {

std::string num(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

json opt_number(const std::optional<double>& v) { return v ? json_number(*v) : json("undefined"); }

std::string dump(const json& j) { return j.dump(2) + "\n"; }

std::string spectrum_bytes(const SpectralField& f) {
  std::ostringstream os(std::ios::binary);
  write_spectrum_binary(os, f);
  return os.str();
}

struct Outcome {
  Artifacts files;
  int code = kExitOk;
};

Outcome run_simulate(const RunConfig& c, std::ostream& console) {
  Outcome out;
  const GridSpec grid = make_grid(c.n);
  const ForcingSpec forcing = make_forcing(grid, c.forcing, c.params, c.experiment.s1);
  FlowState state = random_state(grid, *c.seed, c.experiment.initial_amplitude);
  const std::vector<double> lp = {forcing.q_a, forcing.q_a1};

  std::vector<NormRecord> records{make_norm_record(state, c.params, c.experiment.s1, c.experiment.s2, lp)};
  long steps = 0;
  json summary;
  try {
    state = integrate(state, forcing, c.params, c.integrator, {}, [&](const FlowState& s, double) {
      ++steps;
      if (steps % c.sample_every == 0 || s.t >= c.integrator.t_end)
        records.push_back(make_norm_record(s, c.params, c.experiment.s1, c.experiment.s2, lp));
    });
  } catch (const BlowUpError& e) {
    std::ostringstream ck(std::ios::binary);
    write_checkpoint(ck, e.last_valid(), c.params);
    out.files["checkpoint_last_valid.bin"] = ck.str();
    out.files["error.json"] = error_record(kExitBlowUp, "blow_up", e.what()) + "\n";
    out.code = kExitBlowUp;
    summary["status"] = "blow_up";
    summary["message"] = e.what();
  }
  if (records.back().t != state.t && out.code == kExitOk)
    records.push_back(make_norm_record(state, c.params, c.experiment.s1, c.experiment.s2, lp));

  std::ostringstream csv;
  csv << "t,theta,theta_beta,theta_2beta,theta_s1,u,u_alpha,u_2alpha,u_s2,theta_lq_a,theta_lq_a1\n";
  for (const auto& r : records) {
    csv << num(r.t) << ',' << num(r.theta) << ',' << num(r.theta_beta) << ',' << num(r.theta_2beta) << ','
        << num(r.theta_s1) << ',' << num(r.u) << ',' << num(r.u_alpha) << ',' << num(r.u_2alpha) << ',' << num(r.u_s2)
        << ',' << num(r.theta_lp.at(0)) << ',' << num(r.theta_lp.at(1)) << '\n';
  }
  out.files["norms.csv"] = csv.str();

  if (out.code == kExitOk) {
    out.files["theta.spec"] = spectrum_bytes(state.theta);
    out.files["omega.spec"] = spectrum_bytes(state.omega);
    std::ostringstream ck(std::ios::binary);
    write_checkpoint(ck, state, c.params);
    out.files["checkpoint.bin"] = ck.str();
    summary["status"] = "ok";
  }
  const EigenIndex index(grid);
  const BoundReport report = make_bound_report(forcing, c.params, index, c.c_free, {});
  const AprioriMargins m = monitor_apriori(records, report, forcing, c.params);
  summary["steps"] = steps;
  summary["t_final"] = json_number(records.back().t);
  summary["apriori"] = {{"sup_value", json_number(m.sup_value)},
                        {"fitted_c", json_number(m.fitted_c)},
                        {"window_sup", json_number(m.window_sup)},
                        {"window_reference", json_number(m.window_reference)},
                        {"window_fitted_c", json_number(m.window_fitted_c)}};
  summary["N"] = json_number(report.n_value.N);
  out.files["summary.json"] = dump(summary);
  console << "simulate: " << steps << " steps to t = " << num(records.back().t) << ", ||theta|| = " << num(records.back().theta)
          << ", ||u|| = " << num(records.back().u) << "\n";
  return out;
}

Outcome run_squeeze(const RunConfig& c, std::ostream& console) {
  Outcome out;
  const AttractorSample start = spin_up_experiment(c.experiment);
  const SqueezingResult r = run_squeezing(c.experiment, start);
  const GronwallRecord g = run_trajectory_pair(c.experiment, start);
  std::ostringstream gcsv;
  gcsv << "t,y,dissipation,exponent\n";
  for (std::size_t i = 0; i < g.t.size(); ++i)
    gcsv << num(g.t[i]) << ',' << num(g.y[i]) << ',' << num(g.dissipation[i]) << ',' << num(g.exponent[i]) << '\n';
  out.files["gronwall.csv"] = gcsv.str();
  const auto& ms = r.m_values;
  std::ostringstream series, pairs;
  series << "pair,t,y";
  pairs << "pair,ok,y0,yT";
  for (int m : ms) series << ",z_m" << m;
  for (int m : ms) pairs << ",z0_m" << m;
  for (int m : ms) pairs << ",zT_m" << m;
  series << '\n';
  pairs << '\n';
  for (const auto& s : r.series) {
    series << s.pair << ',' << num(s.t) << ',' << num(s.y);
    for (double z : s.z) series << ',' << num(z);
    series << '\n';
  }
  int failed = 0;
  json failures = json::array();
  for (const auto& p : r.pairs) {
    pairs << p.pair << ',' << (p.ok ? 1 : 0) << ',' << num(p.y0) << ',' << num(p.yT);
    for (std::size_t i = 0; i < ms.size(); ++i) pairs << ',' << num(i < p.z0.size() ? p.z0[i] : NAN);
    for (std::size_t i = 0; i < ms.size(); ++i) pairs << ',' << num(i < p.zT.size() ? p.zT[i] : NAN);
    pairs << '\n';
    if (!p.ok) {
      ++failed;
      failures.push_back({{"pair", p.pair}, {"message", p.error}});
    }
  }
  json delta = json::array();
  for (std::size_t i = 0; i < ms.size(); ++i) delta.push_back({{"m", ms[i]}, {"delta_hat", opt_number(r.delta_hat[i])}});
  json summary{{"l_hat", opt_number(r.l_hat)},
               {"delta_hat", delta},
               {"spearman_delta_vs_m", json_number(r.spearman_delta)},
               {"spin_up_plateau", r.spin_up_plateau},
               {"failed_pairs", failures}};
  summary["codimension"] = r.codimension ? json(*r.codimension) : json("undefined");
  summary["dimension_bound"] = opt_number(r.dimension_bound);
  summary["gronwall"] = {{"log_C_fit", json_number(g.log_c_fit)}, {"holds", g.holds}, {"degenerate", g.degenerate}};
  out.files["squeezing_series.csv"] = series.str();
  out.files["squeezing_pairs.csv"] = pairs.str();
  out.files["summary.json"] = dump(summary);
  if (failed == static_cast<int>(r.pairs.size())) out.code = kExitBlowUp;
  console << "squeeze: l_hat = " << (r.l_hat ? num(*r.l_hat) : "undefined") << ", spearman(delta_hat, m) = "
          << num(r.spearman_delta) << ", dimension bound = " << (r.dimension_bound ? num(*r.dimension_bound) : "undefined")
          << "\n";
  return out;
}

Outcome run_determine(const RunConfig& c, std::ostream& console) {
  Outcome out;
  const DeterminingResult r = run_determining_modes(c.experiment);
  std::ostringstream csv;
  csv << "m,t,d\n";
  json per_m = json::array();
  int failed = 0;
  for (const auto& s : r.series) {
    for (std::size_t i = 0; i < s.t.size(); ++i) csv << s.m << ',' << num(s.t[i]) << ',' << num(s.d[i]) << '\n';
    json e{{"m", s.m},
           {"rate", json_number(s.rate)},
           {"rate_infinite", s.rate_infinite},
           {"synchronized", s.synchronized},
           {"d0", json_number(s.d.front())},
           {"dT", json_number(s.d.back())}};
    if (s.non_determining) e["status"] = "non-determining at this resolution";
    if (!s.ok) {
      e["error"] = s.error;
      ++failed;
    }
    per_m.push_back(e);
  }
  json summary{{"modes", per_m}, {"spearman_rate_vs_m", json_number(r.spearman_rate)}, {"spin_up_plateau", r.spin_up_plateau}};
  summary["m_star"] = r.m_star ? json(*r.m_star) : json("undefined");
  out.files["determining.csv"] = csv.str();
  out.files["summary.json"] = dump(summary);
  if (!r.series.empty() && failed == static_cast<int>(r.series.size())) out.code = kExitBlowUp;
  console << "determine: m* = " << (r.m_star ? std::to_string(*r.m_star) : "undefined")
          << ", spearman(rate, m) = " << num(r.spearman_rate) << "\n";
  return out;
}

Outcome run_bounds(const RunConfig& c, std::ostream& console) {
  Outcome out;
  const GridSpec grid = make_grid(c.n);
  const EigenIndex index(grid);
  const ForcingSpec forcing = make_forcing(grid, c.forcing, c.params, c.experiment.s1);
  std::vector<int> ms = c.rho_m;
  if (ms.empty())
    for (int m = 1; m <= index.size(); m *= 2) ms.push_back(m);
  const BoundReport report = make_bound_report(forcing, c.params, index, c.c_free, ms);
  out.files["summary.json"] = to_json(report) + "\n";
  console << "bounds: A = " << num(report.aggregates.A) << ", B = " << num(report.aggregates.B)
          << ", M = " << num(report.exponents.M) << ", N = " << num(report.n_value.N)
          << ", threshold = " << num(report.threshold.value) << ", m* = "
          << (report.threshold.resolved ? std::to_string(report.threshold.m_star) : "unresolved at this n") << "\n";
  if (!report.threshold.resolved) out.code = kExitUnresolved;
  return out;
}

Outcome run_inequalities(const RunConfig& c, std::ostream& console) {
  Outcome out;
  const auto& q = c.inequalities;
  const GridSpec grid = make_grid(c.n);
  const std::uint64_t seed = *c.seed;
  std::vector<InequalityReport> reports;
  const int band = product_band(grid);
  for (const auto& name : q.select) {
    if (name == "poincare") {
      reports.push_back(check_poincare(random_samples(grid, q.samples, seed, q.decay), q.s1, q.s2));
    } else if (name == "interpolation") {
      reports.push_back(check_interpolation(random_samples(grid, q.samples, seed + 1, q.decay), q.s1, q.s, q.s2));
    } else if (name == "sobolev") {
      reports.push_back(check_sobolev(random_samples(grid, q.samples, seed + 2, q.decay), q.sobolev_s));
    } else if (name == "kato_ponce") {
      reports.push_back(check_kato_ponce(random_samples(grid, q.pair_samples, seed + 3, q.decay, band),
                                         random_samples(grid, q.pair_samples, seed + 4, q.decay, band), q.product_s));
    } else if (name == "commutator") {
      reports.push_back(check_commutator(random_samples(grid, q.pair_samples, seed + 5, q.decay, band),
                                         random_samples(grid, q.pair_samples, seed + 6, q.decay, band), q.product_s));
    } else if (name == "uniform_gronwall") {
      reports.push_back(check_uniform_gronwall(
          random_gronwall_instances(q.gronwall_instances, q.gronwall_cells, q.gronwall_cell, seed + 7), q.gronwall_window));
    }
  }
  std::ostringstream csv;
  csv << "id,count,worst_margin,worst_relative_margin,max_ratio,fitted_constant,reference_constant,violations,passed\n";
  char line[256];
  std::snprintf(line, sizeof line, "%-18s %7s %14s %14s %12s %10s %s\n", "inequality", "count", "worst margin", "worst rel",
                "max ratio", "violations", "result");
  console << line;
  json summary = json::array();
  for (const auto& r : reports) {
    csv << r.id << ',' << r.count << ',' << num(r.worst_margin) << ',' << num(r.worst_relative_margin) << ','
        << num(r.max_ratio) << ',' << (r.fitted_constant ? num(*r.fitted_constant) : "") << ','
        << (r.reference_constant ? num(*r.reference_constant) : "") << ',' << r.violations << ',' << (r.passed ? 1 : 0)
        << '\n';
    std::snprintf(line, sizeof line, "%-18s %7ld %14.6e %14.6e %12.6g %10ld %s\n", r.id.c_str(), r.count, r.worst_margin,
                  r.worst_relative_margin, r.max_ratio, r.violations, r.passed ? "pass" : "FAIL");
    console << line;
    json e{{"id", r.id},
           {"count", r.count},
           {"worst_margin", json_number(r.worst_margin)},
           {"worst_relative_margin", json_number(r.worst_relative_margin)},
           {"max_ratio", json_number(r.max_ratio)},
           {"violations", r.violations},
           {"passed", r.passed}};
    if (r.fitted_constant) e["fitted_constant"] = json_number(*r.fitted_constant);
    if (r.reference_constant) e["reference_constant"] = json_number(*r.reference_constant);
    summary.push_back(e);
    if (!r.passed) out.code = kExitFailure;
  }
  out.files["inequalities.csv"] = csv.str();
  out.files["summary.json"] = dump(json{{"reports", summary}});
  return out;
}

Outcome run_gauss(const RunConfig& c, std::ostream& console) {
  Outcome out;
  const double g = gauss_constant();
  char text[64];
  std::snprintf(text, sizeof text, "%.*f", c.digits, g);
  console << text << "\n";
  out.files["summary.json"] = dump(json{{"gauss_constant", json_number(g)}, {"digits", c.digits}, {"text", text}});
  return out;
}

}  // namespace

int run(const RunConfig& config, std::ostream& console, std::ostream& errors) {
  Outcome out;
  try {
    if (config.command == "simulate")
      out = run_simulate(config, console);
    else if (config.command == "squeeze")
      out = run_squeeze(config, console);
    else if (config.command == "determine")
      out = run_determine(config, console);
    else if (config.command == "bounds")
      out = run_bounds(config, console);
    else if (config.command == "inequalities")
      out = run_inequalities(config, console);
    else if (config.command == "gauss")
      out = run_gauss(config, console);
    else
      throw ConfigError("unknown subcommand '" + config.command + "'");
  } catch (const ConfigError& e) {
    out = {};
    out.code = kExitConfig;
    out.files["error.json"] = error_record(kExitConfig, "config", e.what()) + "\n";
  } catch (const BlowUpError& e) {
    out = {};
    out.code = kExitBlowUp;
    out.files["error.json"] = error_record(kExitBlowUp, "blow_up", e.what()) + "\n";
  } catch (const std::invalid_argument& e) {
    out = {};
    out.code = kExitConfig;
    out.files["error.json"] = error_record(kExitConfig, "config", e.what()) + "\n";
  } catch (const std::exception& e) {
    out = {};
    out.code = kExitFailure;
    out.files["error.json"] = error_record(kExitFailure, "internal", e.what()) + "\n";
  }
  out.files["config.ini"] = to_config_text(config);
  if (auto it = out.files.find("error.json"); it != out.files.end()) errors << it->second;
  write_artifacts(config.output_dir, out.files);
  return out.code;
}

}  // namespace fbq

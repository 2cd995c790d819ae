#pragma once

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fbq/boussinesq.hpp"
#include "fbq/experiments.hpp"
#include "fbq/integrator.hpp"

namespace fbq {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct InequalityConfig {
  std::vector<std::string> select = {"poincare", "interpolation", "sobolev", "kato_ponce", "commutator",
                                     "uniform_gronwall"};
  int samples = 1000;
  int pair_samples = 200;  // Kato-Ponce and commutator
  double decay = 2.0;
  double s1 = 0.0, s = 0.5, s2 = 1.0;  // Poincare uses (s1, s2), interpolation all three
  double sobolev_s = 0.5;
  double product_s = 0.75;             // Kato-Ponce / commutator order
  int gronwall_instances = 100;
  int gronwall_cells = 200;
  int gronwall_window = 20;  // r in cells
  double gronwall_cell = 0.05;
};

struct RunConfig {
  std::string command;  // simulate | squeeze | determine | bounds | inequalities | gauss
  int n = 0;
  PhysParams params;
  std::vector<ForcingMode> forcing;
  IntegratorConfig integrator;
  ExperimentConfig experiment;  // n, params, forcing, integrator, seed mirrored from above
  InequalityConfig inequalities;
  std::string output_dir = "out";
  std::optional<std::uint64_t> seed;
  int threads = 1;
  int sample_every = 10;   // simulate: steps between norm records
  double c_free = 1.0;     // free constant in the threshold formulas
  int digits = 10;         // gauss
  std::vector<int> rho_m;  // bounds: m values whose rho_m is reported

  /// Copies the shared fields into `experiment` and checks every
  /// module precondition. Throws ConfigError naming the violated constraint.
  void finalize();
};

inline const std::vector<std::string>& known_commands() {
  static const std::vector<std::string> c = {"simulate", "squeeze", "determine", "bounds", "inequalities", "gauss"};
  return c;
}

/// Sectioned key = value text ('#' and ';' start comments). Repeated
/// `mode = k1 k2 amplitude sin|cos` lines in [forcing] build the forcing.
/// The result is not finalized, so command line overrides can still apply.
RunConfig parse_config(const std::string& text);

/// Canonical text form; parse_config(to_config_text(c)) reproduces c except
/// for the output directory, which is left out so reruns elsewhere match.
std::string to_config_text(const RunConfig& config);

/// Edit distance, used for "did you mean" suggestions.
std::size_t levenshtein(const std::string& a, const std::string& b);

}  // namespace fbq

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "fbq/boussinesq.hpp"
#include "fbq/eigen_index.hpp"
#include "fbq/integrator.hpp"

namespace fbq {

struct ExperimentConfig {
  int n = 64;
  PhysParams params;
  std::vector<ForcingMode> forcing;
  IntegratorConfig integrator;
  double spin_up = 200.0;
  double horizon = 20.0;
  double epsilon = 1e-3;           // perturbation size, sqrt of y(0)
  double initial_amplitude = 1.0;  // RMS of the random initial theta and omega
  std::vector<int> m_values;
  int pairs = 5;
  std::uint64_t seed = 1;
  double s1 = 1.0;  // Sobolev index measuring temperature differences
  double s2 = 1.0;  // Sobolev index measuring velocity differences
  double sync_tolerance = 1e-6;
  int threads = 1;

  /// Throws std::invalid_argument; `modes` is the eigen index size.
  void validate(int modes) const;
};

/// Random mean-zero state with the given RMS amplitude in theta and omega.
FlowState random_state(const GridSpec& grid, std::uint64_t seed, double amplitude);

/// Random perturbation (dtheta, domega) with
/// ||Lambda^{s2} du||^2 + ||Lambda^{s1} dtheta||^2 = epsilon^2.
FlowState random_perturbation(const GridSpec& grid, std::uint64_t seed, double epsilon, double s1, double s2);

/// y = ||Lambda^{s2} (u_a - u_b)||^2 + ||Lambda^{s1} (theta_a - theta_b)||^2,
/// optionally restricted to Q_m.
double difference_norm(const FlowState& a, const FlowState& b, double s1, double s2,
                       const EigenIndex* index = nullptr, int m = 0);

/// Spearman rank correlation (average ranks for ties); nan if undefined.
double spearman(const std::vector<double>& x, const std::vector<double>& y);

/// Spun-up state shared by the experiments (time reset to 0).
struct AttractorSample {
  FlowState state;
  bool plateau = false;
};

/// Random initial state from the seed, integrated for config.spin_up.
AttractorSample spin_up_experiment(const ExperimentConfig& config);

struct SqueezingPair {
  int pair = 0;
  bool ok = true;
  std::string error;
  double y0 = 0.0;
  double yT = 0.0;
  std::vector<double> z0;  // per m
  std::vector<double> zT;  // per m
};

struct SqueezingSample {
  int pair;
  double t;
  double y;
  std::vector<double> z;  // per m
};

struct SqueezingResult {
  std::vector<int> m_values;
  std::vector<SqueezingPair> pairs;
  std::vector<SqueezingSample> series;
  std::optional<double> l_hat;                     // max y(T)/y(0); empty when every y(0) = 0
  std::vector<std::optional<double>> delta_hat;    // max z(T)/y(0) per m
  double spearman_delta = 0.0;                     // rank correlation of delta_hat with m
  bool spin_up_plateau = false;
  std::optional<int> codimension;                  // smallest tested m with delta_hat < 1
  std::optional<double> dimension_bound;
};

/// Spin up, then evolve `pairs` base/perturbed trajectory pairs for the
/// horizon with identical steps; measure y(0), y(T), z(T) per m.
SqueezingResult run_squeezing(const ExperimentConfig& config);
SqueezingResult run_squeezing(const ExperimentConfig& config, const AttractorSample& start);

struct DeterminingSeries {
  int m = 0;
  std::vector<double> t;
  std::vector<double> d;  // ||Q_m w||^2 + ||Q_m eta||^2
  double rate = 0.0;      // fitted exponential decay rate of d; +inf if d hits 0
  bool rate_infinite = false;
  bool synchronized = false;      // d(T) < tol d(0)
  bool non_determining = false;   // d grew past 1e6 d(0)
  bool ok = true;
  std::string error;
};

struct DeterminingResult {
  std::vector<DeterminingSeries> series;  // per m, config order
  std::optional<int> m_star;              // smallest tested m beyond which all synchronize
  double spearman_rate = 0.0;
  bool spin_up_plateau = false;
};

/// Master evolves freely; each slave has its P_m part overwritten by the
/// master's after every step while its Q_m part follows the full dynamics.
DeterminingResult run_determining_modes(const ExperimentConfig& config);
DeterminingResult run_determining_modes(const ExperimentConfig& config, const AttractorSample& start);

/// Least-squares decay rate of log d over the final half of the window that
/// ends at the first sample <= floor (d is round-off from there on).
/// Fewer than two usable samples gives +inf with *infinite set.
double fit_decay_rate(const std::vector<double>& t, const std::vector<double>& d, double floor = 0.0,
                      bool* infinite = nullptr);

struct GronwallRecord {
  std::vector<double> t;
  std::vector<double> y;
  std::vector<double> dissipation;   // sigma \int_0^t ||Lambda^{s2+alpha} w||^2 + ||Lambda^{s1+beta} eta||^2
  std::vector<double> exponent;      // \int_0^t ||Lambda^{s2+alpha}u1||^2 + ||Lambda^{s2+alpha}u2||^2 + ||Lambda^{s1+beta}theta2||^2
  double log_c_fit = 0.0;            // log of the fitted constant C
  bool holds = true;                 // y(t) + dissipation <= y(0) C exp(exponent) everywhere
  bool degenerate = false;           // y(0) = 0
};

GronwallRecord run_trajectory_pair(const ExperimentConfig& config);
GronwallRecord run_trajectory_pair(const ExperimentConfig& config, const AttractorSample& start);

}  // namespace fbq

#pragma once

#include <optional>
#include <string>
#include <vector>

#include "fbq/boussinesq.hpp"
#include "fbq/eigen_index.hpp"

namespace fbq {

/// Forcing/parameter aggregates of the H^{2beta} x H^{2alpha} estimate.
struct Aggregates {
  double A = 0.0;   // ||f||_{L^{4/(2beta-1)}} / kappa
  double B = 0.0;   // e^nu (1+kappa) / (nu^3 kappa^3) ||f||^2
  double A1 = 0.0;  // ||f||_{L^{2/(alpha+beta-1)}} / kappa
};

Aggregates compute_aggregates(const ForcingSpec& forcing, const PhysParams& params);
/// Same, from the three forcing norms directly.
Aggregates compute_aggregates(double norm_l2, double norm_lq_a, double norm_lq_a1, const PhysParams& params);

struct GronwallExponents {
  double M1 = 0.0;
  double M2 = 0.0;
  double M = 0.0;            // max(M1, M2), or M1 when M2 is undefined
  bool m2_defined = true;    // false when 3 alpha - beta <= 0
  bool overflow = false;     // some term evaluated to +inf
};

GronwallExponents compute_M(const PhysParams& params, double A, double B, double A1);

struct NValue {
  double N = 0.0;
  bool overflow = false;  // N exceeds the double range; N = +inf
};

/// N = (1+kappa)^2 e^{2nu} / (kappa^3 nu^2) ||Lambda^beta f||^2 e^{2M},
/// evaluated in log space so overflow is detected rather than produced.
NValue compute_N(const PhysParams& params, double norm_lambda_beta_f, double M);

struct Threshold {
  double value = 0.0;  // lower bound required of lambda_{m+1}
  int m_star = 0;      // smallest m >= 1 with lambda_{m+1} >= value
  bool resolved = false;
};

/// value = [2 C (kappa sqrt(N) + N + 1) / (kappa nu)]^{1/(alpha - 1/2)}.
Threshold determining_threshold(const PhysParams& params, double N, double c_free, const EigenIndex& index);

/// rho_m = 1/2 min{nu lambda^alpha, kappa lambda^beta}.
double rho_m(const PhysParams& params, double lambda);

/// Ladyzhenskaya squeezing bound on the fractal dimension:
/// N ln(8 G^2 l^2 / (1 - delta^2)) / ln(2 / (1 + delta^2)).
double dimension_bound(long codimension, double l, double delta);

/// (2/pi) \int_0^1 dx / sqrt(1 - x^4), by adaptive Gauss-Kronrod after
/// x = 1 - u^2 removes the endpoint singularity.
double gauss_constant(double tolerance = 1e-14);

/// Gamma(1-s) / ((4 pi)^s pi^{s/2} Gamma(1+s)) for s in (0, 1).
double sobolev_constant(double s);

/// Mode count implied by the threshold through lambda_m ~ m^{1/2}:
/// C ((sqrt(N) + kappa/2)^2 + 1 - kappa^2/4) / (kappa nu).
double mode_count_estimate(const PhysParams& params, double N, double c_free);

struct BoundReport {
  Aggregates aggregates;
  GronwallExponents exponents;
  NValue n_value;
  double c_free = 1.0;
  double sigma = 0.0;  // min(nu, kappa)
  Threshold threshold;
  double mode_count_estimate = 0.0;
  struct Rho {
    int m;
    double lambda;
    double rho;
  };
  std::vector<Rho> rho;
  struct Dimension {
    long codimension;
    double l;
    double delta;
    double bound;
  };
  std::optional<Dimension> dimension;
};

/// Evaluates every closed-form quantity for one forcing and parameter set.
/// `rho_ms` lists the m whose rho_m is reported.
BoundReport make_bound_report(const ForcingSpec& forcing, const PhysParams& params, const EigenIndex& index,
                              double c_free, const std::vector<int>& rho_ms);

/// Deterministic JSON text; non-finite numbers become "inf"/"-inf"/"nan".
std::string to_json(const BoundReport& report);

/// Monitored norms of one state.
struct NormRecord {
  double t = 0.0;
  double theta = 0.0;             // ||theta||
  double theta_beta = 0.0;        // ||Lambda^beta theta||
  double theta_2beta = 0.0;       // ||Lambda^{2beta} theta||
  double theta_s1 = 0.0;          // ||Lambda^{s1} theta||
  double u = 0.0;                 // ||u||
  double u_alpha = 0.0;           // ||Lambda^alpha u||
  double u_2alpha = 0.0;          // ||Lambda^{2alpha} u||
  double u_s2 = 0.0;              // ||Lambda^{s2} u||
  std::vector<double> theta_lp;   // ||theta||_{L^p} for each requested p
};

NormRecord make_norm_record(const FlowState& state, const PhysParams& params, double s1, double s2,
                            const std::vector<double>& lp_exponents = {});

struct AprioriMargins {
  double sup_value = 0.0;   // sup_t ||Lambda^{2beta} theta||^2 + ||Lambda^{2alpha} u||^2
  double fitted_c = 0.0;    // sup_value / N
  double window_sup = 0.0;  // sup_t \int_t^{t+1} ||Lambda^beta theta||^2 (nan if the run is shorter than 1)
  double window_reference = 0.0;  // (1+kappa)/kappa^3 ||f||^2
  double window_fitted_c = 0.0;   // window_sup / window_reference
};

/// Throws std::invalid_argument on an empty record set.
AprioriMargins monitor_apriori(const std::vector<NormRecord>& records, const BoundReport& report,
                               const ForcingSpec& forcing, const PhysParams& params);

}  // namespace fbq

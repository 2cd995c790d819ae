#include "fbq/diagnostics.hpp"

#include <algorithm>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "json_util.hpp"

namespace fbq {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();

// c^e * b^f through logs, so a huge factor times a tiny one does not
// overflow on the way. c > 0, b >= 0.
double power_product(double c, double e, double b, double f) {
  if (b == 0.0) return f > 0.0 ? 0.0 : f == 0.0 ? std::pow(c, e) : kInf;
  return std::exp(e * std::log(c) + f * std::log(b));
}
}  // namespace

Aggregates compute_aggregates(double norm_l2, double norm_lq_a, double norm_lq_a1, const PhysParams& params) {
  if (!(params.beta > 0.5) || !(params.alpha + params.beta > 1.0))
    throw std::invalid_argument("aggregates need beta > 1/2 and alpha + beta > 1 for finite L^q exponents");
  const double nu = params.nu, kappa = params.kappa;
  Aggregates a;
  a.A = norm_lq_a / kappa;
  a.B = std::exp(nu) * (1.0 + kappa) / (std::pow(nu, 3) * std::pow(kappa, 3)) * norm_l2 * norm_l2;
  a.A1 = norm_lq_a1 / kappa;
  return a;
}

Aggregates compute_aggregates(const ForcingSpec& forcing, const PhysParams& params) {
  return compute_aggregates(forcing.norm_l2, forcing.norm_lq_a, forcing.norm_lq_a1, params);
}

GronwallExponents compute_M(const PhysParams& params, double A, double B, double A1) {
  const double alpha = params.alpha, beta = params.beta, nu = params.nu, kappa = params.kappa;
  if (!(alpha > 0.5) || !(beta > 0.5))
    throw std::invalid_argument("compute_M needs alpha, beta > 1/2 (exponent denominators vanish otherwise)");
  GronwallExponents out;

  const double e1 = (2.0 * beta + 1.0) / (2.0 * beta - 1.0);
  const double e2 = 4.0 * beta / (2.0 * beta - 1.0);
  const double e3 = (2.0 * alpha + 1.0) / (2.0 * alpha - 1.0);
  const double e4 = 4.0 * alpha / (2.0 * alpha - 1.0);
  const double viscous_b = power_product(nu, -e3, B, e4);
  out.M1 = std::max(power_product(kappa, -e1, A + B, e2) + 1.0 / nu, power_product(nu, -e1, A, e2) + viscous_b);

  const double s = alpha + beta - 1.0;
  const double d = 3.0 * alpha - beta;
  if (d <= 0.0) {
    out.m2_defined = false;
    out.M2 = std::numeric_limits<double>::quiet_NaN();
    out.M = out.M1;
  } else {
    const double f1 = (alpha + beta) / s;
    const double f2 = (2.0 * alpha + 2.0 * beta) / s;
    const double g1 = (beta - alpha) / d;
    const double g2 = 2.0 * alpha / d;
    out.M2 = std::max(power_product(kappa, -f1, A1 + B, f2) + 1.0 / nu, power_product(nu, -g1, A1, g2) + viscous_b);
    out.M = std::max(out.M1, out.M2);
  }
  out.overflow = std::isinf(out.M1) || std::isinf(out.M2);
  return out;
}

NValue compute_N(const PhysParams& params, double norm_lambda_beta_f, double M) {
  const double nu = params.nu, kappa = params.kappa;
  if (std::isnan(M)) throw std::invalid_argument("compute_N needs a finite or +inf M");
  if (norm_lambda_beta_f == 0.0) return {0.0, false};
  const double log_n = 2.0 * std::log1p(kappa) + 2.0 * nu - 3.0 * std::log(kappa) - 2.0 * std::log(nu) +
                       2.0 * std::log(norm_lambda_beta_f) + 2.0 * M;
  if (log_n >= std::log(std::numeric_limits<double>::max())) return {kInf, true};
  return {std::exp(log_n), false};
}

Threshold determining_threshold(const PhysParams& params, double N, double c_free, const EigenIndex& index) {
  if (!(params.alpha > 0.5)) throw std::invalid_argument("determining threshold needs alpha > 1/2");
  if (!(N >= 0.0)) throw std::invalid_argument("N must be nonnegative");
  const double kappa = params.kappa, nu = params.nu;
  Threshold t;
  const double base = 2.0 * c_free * (kappa * std::sqrt(N) + N + 1.0) / (kappa * nu);
  const double log_value = std::log(base) / (params.alpha - 0.5);
  t.value = log_value >= std::log(std::numeric_limits<double>::max()) ? kInf
                                                                       : std::pow(base, 1.0 / (params.alpha - 0.5));
  if (std::isinf(t.value)) {
    t.m_star = 0;
    t.resolved = false;
    return t;
  }
  const int m = std::max(1, index.count_below(t.value));
  t.resolved = m + 1 <= index.size();
  t.m_star = t.resolved ? m : 0;
  return t;
}

double rho_m(const PhysParams& params, double lambda) {
  return 0.5 * std::min(params.nu * std::pow(lambda, params.alpha), params.kappa * std::pow(lambda, params.beta));
}

double dimension_bound(long codimension, double l, double delta) {
  if (codimension < 0) throw std::invalid_argument("codimension must be a natural number");
  if (!(l >= 1.0)) throw std::invalid_argument("Lipschitz factor l must be >= 1");
  if (!(delta > 0.0 && delta < 1.0)) throw std::invalid_argument("squeezing factor delta must lie in (0, 1)");
  const double g = gauss_constant();
  return static_cast<double>(codimension) * std::log(8.0 * g * g * l * l / (1.0 - delta * delta)) /
         std::log(2.0 / (1.0 + delta * delta));
}

double gauss_constant(double tolerance) {
  auto integrand = [](double u) {
    const double x = 1.0 - u * u;
    return 2.0 / std::sqrt((2.0 - u * u) * (1.0 + x * x));
  };
  const double integral =
      boost::math::quadrature::gauss_kronrod<double, 15>::integrate(integrand, 0.0, 1.0, 15, tolerance);
  return 2.0 / std::numbers::pi * integral;
}

double sobolev_constant(double s) {
  if (!(s > 0.0 && s < 1.0)) throw std::invalid_argument("sobolev constant needs s in (0, 1)");
  const double pi = std::numbers::pi;
  return std::tgamma(1.0 - s) / (std::pow(4.0 * pi, s) * std::pow(pi, 0.5 * s) * std::tgamma(1.0 + s));
}

double mode_count_estimate(const PhysParams& params, double N, double c_free) {
  const double kappa = params.kappa, nu = params.nu;
  const double r = std::sqrt(N) + 0.5 * kappa;
  return c_free * (r * r + 1.0 - 0.25 * kappa * kappa) / (kappa * nu);
}

BoundReport make_bound_report(const ForcingSpec& forcing, const PhysParams& params, const EigenIndex& index,
                              double c_free, const std::vector<int>& rho_ms) {
  BoundReport r;
  r.c_free = c_free;
  r.sigma = std::min(params.nu, params.kappa);
  r.aggregates = compute_aggregates(forcing, params);
  r.exponents = compute_M(params, r.aggregates.A, r.aggregates.B, r.aggregates.A1);
  r.n_value = compute_N(params, forcing.norm_lambda_beta, r.exponents.M);
  r.threshold = determining_threshold(params, r.n_value.N, c_free, index);
  r.mode_count_estimate = mode_count_estimate(params, r.n_value.N, c_free);
  for (int m : rho_ms) {
    const double lambda = index.eigenvalue(m);
    r.rho.push_back({m, lambda, rho_m(params, lambda)});
  }
  return r;
}

std::string to_json(const BoundReport& r) {
  using detail::json_number;
  nlohmann::json j;
  j["A"] = json_number(r.aggregates.A);
  j["B"] = json_number(r.aggregates.B);
  j["A1"] = json_number(r.aggregates.A1);
  j["M1"] = json_number(r.exponents.M1);
  j["M2"] = json_number(r.exponents.M2);
  j["M"] = json_number(r.exponents.M);
  j["M2_defined"] = r.exponents.m2_defined;
  j["M_overflow"] = r.exponents.overflow;
  j["N"] = json_number(r.n_value.N);
  j["N_overflow"] = r.n_value.overflow;
  j["C_free"] = json_number(r.c_free);
  j["sigma"] = json_number(r.sigma);
  j["threshold"] = json_number(r.threshold.value);
  j["threshold_resolved"] = r.threshold.resolved;
  if (r.threshold.resolved)
    j["m_star"] = r.threshold.m_star;
  else
    j["m_star"] = "unresolved at this n";
  j["mode_count_estimate"] = json_number(r.mode_count_estimate);
  nlohmann::json rho = nlohmann::json::array();
  for (const auto& x : r.rho)
    rho.push_back({{"m", x.m}, {"lambda", json_number(x.lambda)}, {"rho", json_number(x.rho)}});
  j["rho_m"] = rho;
  if (r.dimension) {
    j["dimension"] = {{"codimension", r.dimension->codimension},
                      {"l", json_number(r.dimension->l)},
                      {"delta", json_number(r.dimension->delta)},
                      {"bound", json_number(r.dimension->bound)}};
  }
  return j.dump(2);
}

NormRecord make_norm_record(const FlowState& state, const PhysParams& params, double s1, double s2,
                            const std::vector<double>& lp_exponents) {
  NormRecord r;
  r.t = state.t;
  r.theta = sobolev_norm(state.theta, 0.0);
  r.theta_beta = sobolev_norm(state.theta, params.beta);
  r.theta_2beta = sobolev_norm(state.theta, 2.0 * params.beta);
  r.theta_s1 = sobolev_norm(state.theta, s1);
  r.u = velocity_sobolev_norm(state.omega, 0.0);
  r.u_alpha = velocity_sobolev_norm(state.omega, params.alpha);
  r.u_2alpha = velocity_sobolev_norm(state.omega, 2.0 * params.alpha);
  r.u_s2 = velocity_sobolev_norm(state.omega, s2);
  if (!lp_exponents.empty()) {
    const auto samples = from_spectral(state.theta);
    for (double p : lp_exponents) r.theta_lp.push_back(lp_norm_samples(state.grid(), samples, p));
  }
  return r;
}

AprioriMargins monitor_apriori(const std::vector<NormRecord>& records, const BoundReport& report,
                               const ForcingSpec& forcing, const PhysParams& params) {
  if (records.empty()) throw std::invalid_argument("monitor_apriori needs at least one record");
  AprioriMargins m;
  for (const auto& r : records)
    m.sup_value = std::max(m.sup_value, r.theta_2beta * r.theta_2beta + r.u_2alpha * r.u_2alpha);
  const double N = report.n_value.N;
  // N = 0 (no forcing) leaves nothing to fit against; reported as 0.
  m.fitted_c = N > 0.0 ? m.sup_value / N : 0.0;

  // Cumulative trapezoid of ||Lambda^beta theta||^2 over the record times.
  std::vector<double> cumulative(records.size(), 0.0);
  for (std::size_t i = 1; i < records.size(); ++i) {
    const double a = records[i - 1].theta_beta * records[i - 1].theta_beta;
    const double b = records[i].theta_beta * records[i].theta_beta;
    cumulative[i] = cumulative[i - 1] + 0.5 * (a + b) * (records[i].t - records[i - 1].t);
  }
  auto integral_to = [&](double t) {
    auto it = std::upper_bound(records.begin(), records.end(), t,
                               [](double v, const NormRecord& r) { return v < r.t; });
    if (it == records.begin()) return 0.0;
    const std::size_t i = static_cast<std::size_t>(it - records.begin()) - 1;
    if (i + 1 >= records.size()) return cumulative.back();
    const double t0 = records[i].t, t1 = records[i + 1].t;
    const double w = (t - t0) / (t1 - t0);
    return cumulative[i] + w * (cumulative[i + 1] - cumulative[i]);
  };
  const double t_last = records.back().t;
  m.window_sup = std::numeric_limits<double>::quiet_NaN();
  for (const auto& r : records) {
    if (r.t + 1.0 > t_last + 1e-12) break;
    const double w = integral_to(r.t + 1.0) - integral_to(r.t);
    m.window_sup = std::isnan(m.window_sup) ? w : std::max(m.window_sup, w);
  }
  m.window_reference = (1.0 + params.kappa) / std::pow(params.kappa, 3) * forcing.norm_l2 * forcing.norm_l2;
  m.window_fitted_c = m.window_reference > 0.0 ? m.window_sup / m.window_reference : 0.0;
  return m;
}

}  // namespace fbq

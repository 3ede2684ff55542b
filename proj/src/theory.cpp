#include "ambc/theory.hpp"

#include <algorithm>
#include <cmath>
#include <complex>
#include <limits>
#include <stdexcept>

#include "ambc/mathkit.hpp"

namespace ambc {
namespace {

// Relative spread below which two per-sample powers are treated as one
// common power (the two-gamma mixture degenerates to a single gamma law).
constexpr double kNearEqualRelTol = 1e-6;

// Degeneracy threshold for the variance ratio in the maximum-likelihood
// crossing; below it the quadratic collapses to the midpoint rule.
constexpr double kMlRatioTol = 1e-9;

bool nearly_equal_power(double a, double b) {
  return std::abs(a - b) <= kNearEqualRelTol * std::max(std::abs(a), std::abs(b));
}

// Q(num / sd) with the deterministic limit honored when sd == 0.
double q_of_ratio(double num, double sd) {
  if (sd > 0.0) {
    return q_function(num / sd);
  }
  if (num > 0.0) return 0.0;
  if (num < 0.0) return 1.0;
  return 0.5;
}

// Upper tail of the Gaussian model for one case iff the current bit is the
// one the decision rule maps to the "below threshold" region.
bool error_is_upper_tail(int current_bit, bool order_flag) {
  return (current_bit == 0) == order_flag;
}

double case_error_gaussian(double gamma, const GaussianStat& stat,
                           bool order_flag) {
  const double sd = std::sqrt(stat.variance);
  const double num = error_is_upper_tail(stat.current_bit, order_flag)
                         ? gamma - stat.mean
                         : stat.mean - gamma;
  return q_of_ratio(num, sd);
}

// Threshold equalizing the two Q arguments of a binary Gaussian pair; the
// form is symmetric in its two (mean, variance) operands.
double weighted_mean_threshold(double mu0, double v0, double mu1, double v1) {
  const double w0 = std::sqrt(v0);
  const double w1 = std::sqrt(v1);
  const double denom = w0 + w1;
  if (denom <= 0.0) {
    return 0.5 * (mu0 + mu1);
  }
  return (mu1 * w0 + mu0 * w1) / denom;
}

// Crossing point of two Gaussian densities, selected between the two means
// (the second root of the quadratic lies outside that interval and is not a
// usable decision boundary).
double ml_crossing(double mu0, double v0, double mu1, double v1) {
  if (!(v0 > 0.0) || !(v1 > 0.0)) {
    throw std::domain_error("ml_crossing: variances must be positive");
  }
  const double ratio = v1 / v0;
  if (std::abs(ratio - 1.0) < kMlRatioTol) {
    return 0.5 * (mu0 + mu1);
  }
  const double delta = mu1 - mu0;
  const double disc =
      std::max(0.0, ratio * delta * delta + (ratio - 1.0) * v1 * std::log(ratio));
  const double base = ratio * mu0 - mu1;
  const double scale = ratio - 1.0;
  const double root_plus = (base + std::sqrt(disc)) / scale;
  const double root_minus = (base - std::sqrt(disc)) / scale;
  const double lo = std::min(mu0, mu1);
  const double hi = std::max(mu0, mu1);
  const bool plus_inside = root_plus >= lo && root_plus <= hi;
  const bool minus_inside = root_minus >= lo && root_minus <= hi;
  if (plus_inside != minus_inside) {
    return plus_inside ? root_plus : root_minus;
  }
  const double mid = 0.5 * (lo + hi);
  return std::abs(root_plus - mid) <= std::abs(root_minus - mid) ? root_plus
                                                                 : root_minus;
}

double gamma_density(double x, double shape, double scale) {
  if (x < 0.0) return 0.0;
  if (x == 0.0) {
    if (shape > 1.0) return 0.0;
    if (shape == 1.0) return 1.0 / scale;
    return std::numeric_limits<double>::infinity();
  }
  const double log_pdf = (shape - 1.0) * std::log(x) - x / scale -
                         log_gamma(shape) - shape * std::log(scale);
  return std::exp(log_pdf);
}

// Point beyond which a gamma law of the given shape/scale carries no mass at
// double precision (tens of standard deviations past the mean).
double gamma_tail_cut(double shape, double scale) {
  return scale * (shape + 40.0 * std::sqrt(shape) + 45.0);
}

QuadratureSpec exact_law_quadrature() {
  QuadratureSpec spec;
  spec.abs_tol = 1e-300;
  spec.rel_tol = 1e-9;
  spec.max_subdivisions = 4000;
  return spec;
}

void check_exact_inputs(double s_adj, double s_cur, int N, int n_a) {
  if (!(s_adj > 0.0) || !std::isfinite(s_adj) || !(s_cur > 0.0) ||
      !std::isfinite(s_cur)) {
    throw std::domain_error("exact law: per-sample powers must be positive");
  }
  if (N < 1 || n_a < 0 || n_a >= N) {
    throw std::domain_error("exact law: need 0 <= n_a < N and N >= 1");
  }
}

bool exact_case_is_pure(double s_adj, double s_cur, int n_a) {
  return n_a == 0 || nearly_equal_power(s_adj, s_cur);
}

void require_finite_threshold(double gamma) {
  if (!std::isfinite(gamma)) {
    throw std::domain_error("threshold must be finite");
  }
}

double xi_of_power(double sigma_sq, double noise_power) {
  return noise_power * (2.0 * sigma_sq - noise_power);
}

void check_psk_variances(double xi0, double xi1) {
  if (!(xi0 > 0.0) || !(xi1 > 0.0)) {
    throw std::domain_error(
        "psk analytics: per-sample energy variances must be positive");
  }
}

}  // namespace

namespace detail {

GaussianStat gauss_case(double s_adj, double s_cur, int N, double n_a,
                        int adjacent_bit, int current_bit) {
  GaussianStat stat;
  stat.mean = n_a * s_adj + (static_cast<double>(N) - n_a) * s_cur;
  stat.variance =
      n_a * s_adj * s_adj + (static_cast<double>(N) - n_a) * s_cur * s_cur;
  stat.adjacent_bit = adjacent_bit;
  stat.current_bit = current_bit;
  return stat;
}

double perfect_ber_value(double gamma, double s0, double s1, int N) {
  const double s_min = std::min(s0, s1);
  const double s_max = std::max(s0, s1);
  const double root_n = std::sqrt(static_cast<double>(N));
  return 0.5 * q_of_ratio(gamma - N * s_min, root_n * s_min) +
         0.5 * q_of_ratio(N * s_max - gamma, root_n * s_max);
}

double perfect_opt_value(double s0, double s1, int N) {
  const double denom = s0 + s1;
  if (denom <= 0.0) {
    return 0.0;
  }
  return 2.0 * N * s0 * s1 / denom;
}

BerBreakdown approx_ber_value(double gamma, double s0, double s1, int N,
                              double n_a) {
  const double powers[2] = {s0, s1};
  const bool order_flag = s0 <= s1;
  BerBreakdown out;
  out.method = BerMethod::approximate;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const GaussianStat stat = gauss_case(powers[i], powers[j], N, n_a, i, j);
      out.per_case[case_index(i, j)] = case_error_gaussian(gamma, stat, order_flag);
    }
  }
  out.total = 0.25 * (out.per_case[0] + out.per_case[1] + out.per_case[2] +
                      out.per_case[3]);
  return out;
}

ConditionalThresholds conditional_opt_values(double s0, double s1, int N,
                                             double n_a) {
  const double powers[2] = {s0, s1};
  ConditionalThresholds out;
  double* slots[2] = {&out.ip0, &out.ip1};
  for (int i = 0; i < 2; ++i) {
    const GaussianStat with_zero = gauss_case(powers[i], s0, N, n_a, i, 0);
    const GaussianStat with_one = gauss_case(powers[i], s1, N, n_a, i, 1);
    *slots[i] = weighted_mean_threshold(with_zero.mean, with_zero.variance,
                                        with_one.mean, with_one.variance);
  }
  return out;
}

double near_opt_value(double s0, double s1, int N, double n_a) {
  const ConditionalThresholds pair = conditional_opt_values(s0, s1, N, n_a);
  return 0.5 * (pair.ip0 + pair.ip1);
}

ConditionalThresholds ml_values(double s0, double s1, int N, double n_a) {
  const double powers[2] = {s0, s1};
  ConditionalThresholds out;
  double* slots[2] = {&out.ip0, &out.ip1};
  for (int i = 0; i < 2; ++i) {
    const GaussianStat with_zero = gauss_case(powers[i], s0, N, n_a, i, 0);
    const GaussianStat with_one = gauss_case(powers[i], s1, N, n_a, i, 1);
    *slots[i] = ml_crossing(with_zero.mean, with_zero.variance, with_one.mean,
                            with_one.variance);
  }
  return out;
}

double exact_case_pdf_value(double z, double s_adj, double s_cur, int N,
                            int n_a) {
  check_exact_inputs(s_adj, s_cur, N, n_a);
  if (!(z > 0.0)) {
    return 0.0;
  }
  if (exact_case_is_pure(s_adj, s_cur, n_a)) {
    return gamma_density(z, static_cast<double>(N), s_cur);
  }
  const double shape_adj = static_cast<double>(n_a);
  const double shape_cur = static_cast<double>(N - n_a);
  const double hi = std::min(z, gamma_tail_cut(shape_adj, s_adj));
  if (!(hi > 0.0)) {
    return 0.0;
  }
  return integrate(
      [=](double y) {
        return gamma_density(y, shape_adj, s_adj) *
               gamma_density(z - y, shape_cur, s_cur);
      },
      0.0, hi, exact_law_quadrature());
}

double exact_case_upper_value(double gamma, double s_adj, double s_cur, int N,
                              int n_a) {
  check_exact_inputs(s_adj, s_cur, N, n_a);
  if (!(gamma > 0.0)) {
    return 1.0;
  }
  if (exact_case_is_pure(s_adj, s_cur, n_a)) {
    return upper_incomplete_gamma_regularized(static_cast<double>(N),
                                              gamma / s_cur);
  }
  const double shape_adj = static_cast<double>(n_a);
  const double shape_cur = static_cast<double>(N - n_a);
  const double hi = std::min(gamma, gamma_tail_cut(shape_adj, s_adj));
  double mass = upper_incomplete_gamma_regularized(shape_adj, gamma / s_adj);
  if (hi > 0.0) {
    mass += integrate(
        [=](double y) {
          const double x = std::max(0.0, gamma - y) / s_cur;
          return gamma_density(y, shape_adj, s_adj) *
                 upper_incomplete_gamma_regularized(shape_cur, x);
        },
        0.0, hi, exact_law_quadrature());
  }
  return std::min(1.0, mass);
}

double exact_case_cdf_value(double gamma, double s_adj, double s_cur, int N,
                            int n_a) {
  check_exact_inputs(s_adj, s_cur, N, n_a);
  if (!(gamma > 0.0)) {
    return 0.0;
  }
  if (exact_case_is_pure(s_adj, s_cur, n_a)) {
    return lower_incomplete_gamma_regularized(static_cast<double>(N),
                                              gamma / s_cur);
  }
  const double shape_adj = static_cast<double>(n_a);
  const double shape_cur = static_cast<double>(N - n_a);
  const double hi = std::min(gamma, gamma_tail_cut(shape_adj, s_adj));
  if (!(hi > 0.0)) {
    return 0.0;
  }
  const double mass = integrate(
      [=](double y) {
        const double x = std::max(0.0, gamma - y) / s_cur;
        return gamma_density(y, shape_adj, s_adj) *
               lower_incomplete_gamma_regularized(shape_cur, x);
      },
      0.0, hi, exact_law_quadrature());
  return std::clamp(mass, 0.0, 1.0);
}

BerBreakdown exact_ber_value(double gamma, double s0, double s1, int N,
                             int n_a) {
  const double powers[2] = {s0, s1};
  const bool order_flag = s0 <= s1;
  BerBreakdown out;
  out.method = BerMethod::exact;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const double value =
          error_is_upper_tail(j, order_flag)
              ? exact_case_upper_value(gamma, powers[i], powers[j], N, n_a)
              : exact_case_cdf_value(gamma, powers[i], powers[j], N, n_a);
      out.per_case[case_index(i, j)] = value;
    }
  }
  out.total = 0.25 * (out.per_case[0] + out.per_case[1] + out.per_case[2] +
                      out.per_case[3]);
  return out;
}

double psk_perfect_ber_value(double gamma, double s0, double s1, int N,
                             double noise_power) {
  const double s_min = std::min(s0, s1);
  const double s_max = std::max(s0, s1);
  const double xi_min = xi_of_power(s_min, noise_power);
  const double xi_max = xi_of_power(s_max, noise_power);
  if (xi_min < 0.0 || xi_max < 0.0) {
    throw std::domain_error("psk law: negative per-sample energy variance");
  }
  return 0.5 * q_of_ratio(gamma - N * s_min, std::sqrt(N * xi_min)) +
         0.5 * q_of_ratio(N * s_max - gamma, std::sqrt(N * xi_max));
}

double psk_opt_value(double s0, double s1, int N, double noise_power) {
  const double s_min = std::min(s0, s1);
  const double s_max = std::max(s0, s1);
  const double w_min = std::sqrt(std::max(0.0, xi_of_power(s_min, noise_power)));
  const double w_max = std::sqrt(std::max(0.0, xi_of_power(s_max, noise_power)));
  const double denom = w_min + w_max;
  if (denom <= 0.0) {
    return 0.5 * N * (s_min + s_max);
  }
  return N * (s_min * w_max + s_max * w_min) / denom;
}

BerBreakdown psk_approx_ber_value(double gamma, double s0, double s1, int N,
                                  double n_a, double noise_power) {
  const double powers[2] = {s0, s1};
  const double xi[2] = {xi_of_power(s0, noise_power),
                        xi_of_power(s1, noise_power)};
  if (xi[0] < 0.0 || xi[1] < 0.0) {
    throw std::domain_error("psk law: negative per-sample energy variance");
  }
  const bool order_flag = s0 <= s1;
  BerBreakdown out;
  out.method = BerMethod::psk_approximate;
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      GaussianStat stat = gauss_case(powers[i], powers[j], N, n_a, i, j);
      stat.variance = n_a * xi[i] + (static_cast<double>(N) - n_a) * xi[j];
      out.per_case[case_index(i, j)] = case_error_gaussian(gamma, stat, order_flag);
    }
  }
  out.total = 0.25 * (out.per_case[0] + out.per_case[1] + out.per_case[2] +
                      out.per_case[3]);
  return out;
}

double psk_near_opt_value(double s0, double s1, int N, double n_a,
                          double noise_power) {
  const double powers[2] = {s0, s1};
  const double xi[2] = {xi_of_power(s0, noise_power),
                        xi_of_power(s1, noise_power)};
  if (xi[0] < 0.0 || xi[1] < 0.0) {
    throw std::domain_error("psk law: negative per-sample energy variance");
  }
  double sum = 0.0;
  for (int i = 0; i < 2; ++i) {
    const double n_rem = static_cast<double>(N) - n_a;
    const double mean0 = n_a * powers[i] + n_rem * s0;
    const double var0 = n_a * xi[i] + n_rem * xi[0];
    const double mean1 = n_a * powers[i] + n_rem * s1;
    const double var1 = n_a * xi[i] + n_rem * xi[1];
    sum += weighted_mean_threshold(mean0, var0, mean1, var1);
  }
  return 0.5 * sum;
}

}  // namespace detail

std::array<GaussianStat, 4> gaussian_stats(const ChannelState& channel,
                                           const SystemParams& params) {
  params.validate();
  const double powers[2] = {channel.sigma0_sq, channel.sigma1_sq};
  const double n_a = static_cast<double>(params.rtse_magnitude);
  std::array<GaussianStat, 4> stats{};
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      stats[case_index(i, j)] = detail::gauss_case(
          powers[i], powers[j], params.samples_per_symbol, n_a, i, j);
    }
  }
  return stats;
}

double perfect_ber(double gamma, const ChannelState& channel, int N) {
  require_finite_threshold(gamma);
  return detail::perfect_ber_value(gamma, channel.sigma0_sq, channel.sigma1_sq,
                                   N);
}

Threshold perfect_opt_threshold(const ChannelState& channel, int N) {
  return Threshold{
      detail::perfect_opt_value(channel.sigma0_sq, channel.sigma1_sq, N),
      ThresholdProvenance::perfect_opt};
}

double exact_case_pdf(double z, int adjacent_bit, int current_bit,
                      const ChannelState& channel, const SystemParams& params) {
  params.validate();
  if ((adjacent_bit != 0 && adjacent_bit != 1) ||
      (current_bit != 0 && current_bit != 1)) {
    throw std::domain_error("exact_case_pdf: bits must be 0 or 1");
  }
  const double powers[2] = {channel.sigma0_sq, channel.sigma1_sq};
  return detail::exact_case_pdf_value(z, powers[adjacent_bit],
                                      powers[current_bit],
                                      params.samples_per_symbol,
                                      params.rtse_magnitude);
}

BerBreakdown exact_ber(double gamma, const ChannelState& channel,
                       const SystemParams& params) {
  params.validate();
  require_finite_threshold(gamma);
  return detail::exact_ber_value(gamma, channel.sigma0_sq, channel.sigma1_sq,
                                 params.samples_per_symbol,
                                 params.rtse_magnitude);
}

BerBreakdown approx_ber(double gamma, const ChannelState& channel,
                        const SystemParams& params) {
  params.validate();
  require_finite_threshold(gamma);
  return detail::approx_ber_value(
      gamma, channel.sigma0_sq, channel.sigma1_sq, params.samples_per_symbol,
      static_cast<double>(params.rtse_magnitude));
}

double ber_difference(const ChannelState& channel, const SystemParams& params) {
  params.validate();
  const double gamma =
      detail::perfect_opt_value(channel.sigma0_sq, channel.sigma1_sq,
                                params.samples_per_symbol);
  const BerBreakdown misaligned = detail::approx_ber_value(
      gamma, channel.sigma0_sq, channel.sigma1_sq, params.samples_per_symbol,
      static_cast<double>(params.rtse_magnitude));
  const double aligned = detail::perfect_ber_value(
      gamma, channel.sigma0_sq, channel.sigma1_sq, params.samples_per_symbol);
  return misaligned.total - aligned;
}

double ber_difference_upper_bound(const ChannelState& channel,
                                  const SystemParams& params) {
  params.validate();
  const double s_min = channel.sigma_min_sq;
  const double s_max = channel.sigma_max_sq;
  const double denom = s_min + s_max;
  if (denom <= 0.0) {
    return 0.25;
  }
  const double arg = std::sqrt(static_cast<double>(params.samples_per_symbol)) *
                     (s_max - s_min) / denom;
  return 0.25 - 0.5 * q_function(arg);
}

ConditionalThresholds conditional_opt_thresholds(const ChannelState& channel,
                                                 const SystemParams& params) {
  params.validate();
  return detail::conditional_opt_values(
      channel.sigma0_sq, channel.sigma1_sq, params.samples_per_symbol,
      static_cast<double>(params.rtse_magnitude));
}

Threshold near_opt_threshold(const ChannelState& channel,
                             const SystemParams& params) {
  params.validate();
  return Threshold{detail::near_opt_value(
                       channel.sigma0_sq, channel.sigma1_sq,
                       params.samples_per_symbol,
                       static_cast<double>(params.rtse_magnitude)),
                   ThresholdProvenance::near_opt};
}

ConditionalThresholds ml_conditional_thresholds(const ChannelState& channel,
                                                const SystemParams& params) {
  params.validate();
  return detail::ml_values(channel.sigma0_sq, channel.sigma1_sq,
                           params.samples_per_symbol,
                           static_cast<double>(params.rtse_magnitude));
}

std::array<double, 2> conditional_error_rates(double gamma, int adjacent_bit,
                                              const ChannelState& channel,
                                              const SystemParams& params) {
  params.validate();
  require_finite_threshold(gamma);
  if (adjacent_bit != 0 && adjacent_bit != 1) {
    throw std::domain_error("conditional_error_rates: bits must be 0 or 1");
  }
  const double powers[2] = {channel.sigma0_sq, channel.sigma1_sq};
  const double n_a = static_cast<double>(params.rtse_magnitude);
  const bool order_flag = channel.order_flag;
  std::array<double, 2> rates{};
  for (int j = 0; j < 2; ++j) {
    const GaussianStat stat =
        detail::gauss_case(powers[adjacent_bit], powers[j],
                           params.samples_per_symbol, n_a, adjacent_bit, j);
    rates[j] = case_error_gaussian(gamma, stat, order_flag);
  }
  return rates;
}

double ber_floor(const ChannelState& channel, const SystemParams& params) {
  params.validate();
  const double direct_power = std::norm(channel.h);
  const double composite_power = std::norm(channel.mu);
  const int N = params.samples_per_symbol;
  const double n_a = static_cast<double>(params.rtse_magnitude);
  const double gamma =
      detail::near_opt_value(direct_power, composite_power, N, n_a);
  return detail::approx_ber_value(gamma, direct_power, composite_power, N, n_a)
      .total;
}

PskAnalytics psk_analytics(double gamma, const ChannelState& channel,
                           const SystemParams& params) {
  params.validate();
  require_finite_threshold(gamma);
  if (params.source_kind != SourceKind::psk) {
    throw std::domain_error("psk_analytics: source must be a PSK waveform");
  }
  const double s0 = channel.sigma0_sq;
  const double s1 = channel.sigma1_sq;
  const double noise = params.noise_power;
  check_psk_variances(xi_of_power(s0, noise), xi_of_power(s1, noise));
  const int N = params.samples_per_symbol;
  const double n_a = static_cast<double>(params.rtse_magnitude);
  PskAnalytics out;
  out.psk_perfect_ber = detail::psk_perfect_ber_value(gamma, s0, s1, N, noise);
  out.psk_opt_threshold = Threshold{detail::psk_opt_value(s0, s1, N, noise),
                                    ThresholdProvenance::perfect_opt};
  out.psk_approx_ber =
      detail::psk_approx_ber_value(gamma, s0, s1, N, n_a, noise);
  out.psk_near_opt_threshold =
      Threshold{detail::psk_near_opt_value(s0, s1, N, n_a, noise),
                ThresholdProvenance::near_opt};
  return out;
}

}  // namespace ambc

#pragma once
// Closed-form and semi-closed-form detection analytics: error rates under
// perfect and misaligned timing (exact gamma-mixture law and Gaussian
// approximation), balanced and maximum-likelihood threshold formulas, the
// misalignment-induced BER penalty and its bound, PSK-source variants, and
// the high-SNR BER floor.

#include <array>

#include "ambc/detector.hpp"
#include "ambc/model.hpp"

namespace ambc {

/// Index into per-case arrays for (adjacent bit i, current bit j).
constexpr int case_index(int adjacent_bit, int current_bit) {
  return adjacent_bit * 2 + current_bit;
}

/// Gaussian moments of the window energy for one (adjacent, current) case:
/// mean n_a*sigma_i^2 + (N-n_a)*sigma_j^2 and variance
/// n_a*sigma_i^4 + (N-n_a)*sigma_j^4.
struct GaussianStat {
  double mean = 0.0;
  double variance = 0.0;
  int adjacent_bit = 0;
  int current_bit = 0;
};

enum class BerMethod { exact, approximate, perfect_ts, psk_perfect, psk_approximate };

/// Total error rate plus the four conditional per-case error probabilities,
/// each case carrying weight 1/4 in the total.
struct BerBreakdown {
  double total = 0.0;
  std::array<double, 4> per_case{};  // indexed by case_index(i, j)
  BerMethod method = BerMethod::approximate;
};

/// A pair of case-conditional thresholds (adjacent bit 0 / adjacent bit 1).
struct ConditionalThresholds {
  double ip0 = 0.0;
  double ip1 = 0.0;
};

/// The four (mean, variance) pairs of the Gaussian energy model.
std::array<GaussianStat, 4> gaussian_stats(const ChannelState& channel,
                                           const SystemParams& params);

/// Error rate of the energy detector under perfect timing at threshold gamma.
double perfect_ber(double gamma, const ChannelState& channel, int N);

/// Threshold minimizing the perfect-timing error rate:
/// 2 N sigma0^2 sigma1^2 / (sigma0^2 + sigma1^2).
Threshold perfect_opt_threshold(const ChannelState& channel, int N);

/// Exact density of the window energy for one case. Pure cases (i == j or
/// n_a == 0) follow a gamma law of shape N; mixed cases are the convolution
/// of two gamma laws with shapes n_a and N - n_a and the two per-sample
/// powers as scales, evaluated by numerical convolution in log domain.
double exact_case_pdf(double z, int adjacent_bit, int current_bit,
                      const ChannelState& channel, const SystemParams& params);

/// Exact error rate at threshold gamma: four tail/CDF integrals of the
/// gamma-mixture law, integration direction per case set by the ordering of
/// sigma0^2 and sigma1^2. Quadrature failures propagate as convergence_error.
BerBreakdown exact_ber(double gamma, const ChannelState& channel,
                       const SystemParams& params);

/// Gaussian-approximate error rate at threshold gamma (four Q terms).
BerBreakdown approx_ber(double gamma, const ChannelState& channel,
                        const SystemParams& params);

/// Error-rate penalty of timing misalignment at the perfect-timing optimal
/// threshold: approximate misaligned BER minus perfect-timing BER.
double ber_difference(const ChannelState& channel, const SystemParams& params);

/// Upper bound of ber_difference over the admissible misalignment range:
/// 1/4 - Q(sqrt(N) (sigma_max^2 - sigma_min^2) / (sigma_min^2 + sigma_max^2)) / 2.
double ber_difference_upper_bound(const ChannelState& channel,
                                  const SystemParams& params);

/// Case-conditional balanced thresholds: each equalizes the two conditional
/// error rates of its adjacent-bit case in the Gaussian model.
ConditionalThresholds conditional_opt_thresholds(const ChannelState& channel,
                                                 const SystemParams& params);

/// Misalignment-aware threshold: midpoint of the two case-conditional
/// balanced thresholds.
Threshold near_opt_threshold(const ChannelState& channel,
                             const SystemParams& params);

/// Maximum-likelihood thresholds per adjacent-bit case: the crossing point of
/// the two case densities in the Gaussian model, selected between the two
/// case means. Falls back to the midpoint of the means when the variance
/// ratio degenerates to 1.
ConditionalThresholds ml_conditional_thresholds(const ChannelState& channel,
                                                const SystemParams& params);

/// Gaussian-model conditional error rates at threshold gamma for one
/// adjacent-bit case: {P(decide 1 | bit 0, adjacent i), P(decide 0 | bit 1,
/// adjacent i)}.
std::array<double, 2> conditional_error_rates(double gamma, int adjacent_bit,
                                              const ChannelState& channel,
                                              const SystemParams& params);

/// Limit of approx_ber at near_opt_threshold as source power grows without
/// bound; depends only on |h|^2, |mu|^2, N and n_a. Equal channel moduli give
/// 1/2.
double ber_floor(const ChannelState& channel, const SystemParams& params);

/// PSK-source analytics evaluated at threshold gamma.
struct PskAnalytics {
  double psk_perfect_ber = 0.0;     ///< perfect-timing error rate at gamma
  Threshold psk_opt_threshold;      ///< optimal perfect-timing threshold
  BerBreakdown psk_approx_ber;      ///< misaligned four-term approximation
  Threshold psk_near_opt_threshold; ///< misalignment-aware threshold
};

/// Requires a PSK source and positive per-sample energy variances
/// (throws std::domain_error otherwise).
PskAnalytics psk_analytics(double gamma, const ChannelState& channel,
                           const SystemParams& params);

// Low-level value functions on raw per-sample powers. The public API above
// wraps these with ChannelState/SystemParams; the estimation module and the
// floor evaluate them at estimated or limiting quantities, and boundary
// studies may pass non-integral misalignment values.
namespace detail {

/// Mean/variance of the Gaussian energy model for a case with n_a samples at
/// power s_adj and N - n_a samples at power s_cur.
GaussianStat gauss_case(double s_adj, double s_cur, int N, double n_a,
                        int adjacent_bit = 0, int current_bit = 0);

double perfect_ber_value(double gamma, double s0, double s1, int N);
double perfect_opt_value(double s0, double s1, int N);
BerBreakdown approx_ber_value(double gamma, double s0, double s1, int N,
                              double n_a);
ConditionalThresholds conditional_opt_values(double s0, double s1, int N,
                                             double n_a);
double near_opt_value(double s0, double s1, int N, double n_a);
ConditionalThresholds ml_values(double s0, double s1, int N, double n_a);

/// Exact law per case: density, lower CDF, and upper tail at gamma.
double exact_case_pdf_value(double z, double s_adj, double s_cur, int N,
                            int n_a);
double exact_case_cdf_value(double gamma, double s_adj, double s_cur, int N,
                            int n_a);
double exact_case_upper_value(double gamma, double s_adj, double s_cur, int N,
                              int n_a);
BerBreakdown exact_ber_value(double gamma, double s0, double s1, int N,
                             int n_a);

/// PSK variants; xi terms are noise_power * (2 sigma^2 - noise_power).
double psk_perfect_ber_value(double gamma, double s0, double s1, int N,
                             double noise_power);
double psk_opt_value(double s0, double s1, int N, double noise_power);
BerBreakdown psk_approx_ber_value(double gamma, double s0, double s1, int N,
                                  double n_a, double noise_power);
double psk_near_opt_value(double s0, double s1, int N, double n_a,
                          double noise_power);

}  // namespace detail

}  // namespace ambc

#include "ambc/estimator.hpp"

#include <algorithm>
#include <cmath>

#include "ambc/theory.hpp"

namespace ambc {
namespace {

double quartile_mean(const std::vector<double>& sorted, std::size_t quartile) {
  const std::size_t span = sorted.size() / 4;
  const std::size_t begin = quartile * span;
  double sum = 0.0;
  for (std::size_t idx = begin; idx < begin + span; ++idx) {
    sum += sorted[idx];
  }
  return sum / static_cast<double>(span);
}

}  // namespace

std::vector<double> block_powers(const SymbolStream& stream) {
  const int symbols = stream.params.symbols_per_block;
  const double scale = 1.0 / static_cast<double>(stream.params.samples_per_symbol);
  std::vector<double> powers;
  powers.reserve(static_cast<std::size_t>(symbols));
  for (int k = 1; k <= symbols; ++k) {
    powers.push_back(test_statistic(window(stream, k)) * scale);
  }
  return powers;
}

EstimatedParams estimate_params(const std::vector<double>& powers, int N) {
  if (N < 2) {
    throw std::domain_error("estimate_params: need at least 2 samples per symbol");
  }
  if (powers.size() < 8 || powers.size() % 4 != 0) {
    throw std::domain_error(
        "estimate_params: need at least 8 window powers in a multiple of 4");
  }
  for (double value : powers) {
    if (!std::isfinite(value) || value < 0.0) {
      throw std::domain_error("estimate_params: window powers must be finite and non-negative");
    }
  }
  std::vector<double> sorted = powers;
  std::sort(sorted.begin(), sorted.end());

  EstimatedParams out;
  for (std::size_t q = 0; q < 4; ++q) {
    out.quartile_means[q] = quartile_mean(sorted, q);
  }
  const double spread = out.quartile_means[3] - out.quartile_means[0];
  if (!(spread > 0.0)) {
    throw estimation_error(
        "estimate_params: window powers show no level separation");
  }
  out.sigma_min_hat_sq = out.quartile_means[0];
  out.sigma_max_hat_sq = out.quartile_means[3];

  const double inner = out.quartile_means[2] - out.quartile_means[1];
  const double half_window = 0.5 * static_cast<double>(N);
  const double raw = half_window * (1.0 - inner / spread);
  const double hi = std::nextafter(half_window, 0.0);
  out.n_a_hat = std::clamp(raw, 0.0, hi);
  return out;
}

Threshold estimated_threshold(const EstimatedParams& estimate,
                              const SystemParams& params) {
  params.validate();
  const double s_min = estimate.sigma_min_hat_sq;
  const double s_max = estimate.sigma_max_hat_sq;
  const double n_a = estimate.n_a_hat;
  const int N = params.samples_per_symbol;
  if (!std::isfinite(s_min) || !std::isfinite(s_max) || !std::isfinite(n_a) ||
      s_min < 0.0 || s_max < s_min || n_a < 0.0 ||
      n_a >= 0.5 * static_cast<double>(N)) {
    throw std::domain_error("estimated_threshold: malformed estimates");
  }
  double value = 0.0;
  if (params.source_kind == SourceKind::psk) {
    const double noise = params.noise_power;
    const double xi_min = noise * (2.0 * s_min - noise);
    if (!(xi_min > 0.0)) {
      throw estimation_error(
          "estimated_threshold: estimated energy variance is not positive");
    }
    value = detail::psk_near_opt_value(s_min, s_max, N, n_a, noise);
  } else {
    value = detail::near_opt_value(s_min, s_max, N, n_a);
  }
  return Threshold{value, ThresholdProvenance::near_opt_estimated};
}

}  // namespace ambc

#include "ambc/detector.hpp"

#include <stdexcept>

namespace ambc {

const char* provenance_name(ThresholdProvenance provenance) {
  switch (provenance) {
    case ThresholdProvenance::perfect_opt:
      return "perfect_opt";
    case ThresholdProvenance::near_opt:
      return "near_opt";
    case ThresholdProvenance::near_opt_estimated:
      return "near_opt_estimated";
    case ThresholdProvenance::ml_conditional:
      return "ml_conditional";
    case ThresholdProvenance::manual:
      return "manual";
  }
  return "unknown";
}

double test_statistic(std::span<const std::complex<double>> slice) {
  if (slice.empty()) {
    throw std::domain_error("test_statistic requires a non-empty slice");
  }
  double energy = 0.0;
  for (const auto& y : slice) {
    energy += y.real() * y.real() + y.imag() * y.imag();
  }
  return energy;
}

std::uint8_t decide(double gamma_stat, const Threshold& threshold,
                    bool order_flag) {
  const bool above = gamma_stat >= threshold.value;
  if (order_flag) {
    return above ? 1 : 0;
  }
  return above ? 0 : 1;
}

DetectionReport detect_block(const SymbolStream& stream,
                             const Threshold& threshold) {
  const SystemParams& p = stream.params;
  DetectionReport report;
  report.decoded.resize(static_cast<std::size_t>(p.symbols_per_block));
  const bool order_flag = stream.channel.order_flag;
  for (int k = 1; k <= p.symbols_per_block; ++k) {
    const double energy = test_statistic(window(stream, k));
    const std::uint8_t decoded = decide(energy, threshold, order_flag);
    const std::uint8_t truth = stream.bits[static_cast<std::size_t>(k)];
    const std::uint8_t adjacent =
        stream.bits[static_cast<std::size_t>(adjacent_symbol_index(p, k))];
    report.decoded[static_cast<std::size_t>(k - 1)] = decoded;
    report.case_counts[adjacent][truth] += 1;
    if (decoded != truth) {
      report.error_count += 1;
      report.case_errors[adjacent][truth] += 1;
    }
  }
  return report;
}

}  // namespace ambc

#include "ambc/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <thread>

#include "ambc/detector.hpp"
#include "ambc/estimator.hpp"
#include "ambc/mathkit.hpp"
#include "ambc/rng.hpp"
#include "ambc/theory.hpp"

namespace ambc {
namespace {

constexpr long long kMinBerTrials = 10000;
constexpr double kExtremeSnrLinear = 1e12;  // operating point for floor checks

// ---------------------------------------------------------------------------
// Text helpers (config grammar and CSV formatting).
// ---------------------------------------------------------------------------

std::string trim(const std::string& text) {
  std::size_t begin = 0;
  std::size_t end = text.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(text[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(text[end - 1]))) --end;
  return text.substr(begin, end - begin);
}

std::string to_lower(std::string text) {
  for (char& c : text) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return text;
}

double parse_double(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const double parsed = std::stod(value, &used);
    if (trim(value.substr(used)).empty()) return parsed;
  } catch (const std::exception&) {
  }
  throw config_error("invalid numeric value for '" + key + "': " + value);
}

long long parse_int(const std::string& key, const std::string& value) {
  try {
    std::size_t used = 0;
    const long long parsed = std::stoll(value, &used);
    if (trim(value.substr(used)).empty()) return parsed;
  } catch (const std::exception&) {
  }
  throw config_error("invalid integer value for '" + key + "': " + value);
}

std::vector<std::string> split_list(const std::string& value) {
  std::vector<std::string> parts;
  std::size_t start = 0;
  while (start <= value.size()) {
    const std::size_t comma = value.find(',', start);
    if (comma == std::string::npos) {
      parts.push_back(trim(value.substr(start)));
      break;
    }
    parts.push_back(trim(value.substr(start, comma - start)));
    start = comma + 1;
  }
  return parts;
}

std::vector<double> parse_double_list(const std::string& key, const std::string& value) {
  std::vector<double> out;
  for (const std::string& part : split_list(value)) {
    if (part.empty()) throw config_error("empty list entry for '" + key + "'");
    out.push_back(parse_double(key, part));
  }
  if (out.empty()) throw config_error("empty list for '" + key + "'");
  return out;
}

std::vector<int> parse_int_list(const std::string& key, const std::string& value) {
  std::vector<int> out;
  for (const std::string& part : split_list(value)) {
    if (part.empty()) throw config_error("empty list entry for '" + key + "'");
    out.push_back(static_cast<int>(parse_int(key, part)));
  }
  if (out.empty()) throw config_error("empty list for '" + key + "'");
  return out;
}

std::complex<double> parse_complex(const std::string& key, const std::string& value) {
  const std::vector<std::string> parts = split_list(value);
  if (parts.size() == 1) {
    return {parse_double(key, parts[0]), 0.0};
  }
  if (parts.size() == 2) {
    return {parse_double(key, parts[0]), parse_double(key, parts[1])};
  }
  throw config_error("expected 're' or 're,im' for '" + key + "': " + value);
}

std::string format_double(double value) {
  char buffer[64];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string format_int(long long value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%lld", value);
  return buffer;
}

/// Minimal CSV accumulator: comma-separates cells, newline-terminates rows.
class CsvBuilder {
 public:
  void cell(const std::string& text) {
    if (row_open_) out_ += ',';
    out_ += text;
    row_open_ = true;
  }
  void cell(const char* text) { cell(std::string(text)); }
  void cell(double value) { cell(format_double(value)); }
  void cell(long long value) { cell(format_int(value)); }
  void cell(int value) { cell(format_int(value)); }
  void cell(std::uint64_t value) { cell(format_int(static_cast<long long>(value))); }
  void end_row() {
    out_ += '\n';
    row_open_ = false;
  }
  const std::string& text() const { return out_; }

 private:
  std::string out_;
  bool row_open_ = false;
};

const char* sign_name(RtseSign sign) {
  switch (sign) {
    case RtseSign::negative: return "negative";
    case RtseSign::zero: return "zero";
    case RtseSign::positive: return "positive";
  }
  return "?";
}

const char* source_name(SourceKind kind) {
  return kind == SourceKind::psk ? "psk" : "gaussian";
}

// ---------------------------------------------------------------------------
// Simulation plumbing.
// ---------------------------------------------------------------------------

std::vector<std::uint8_t> pattern_bits(int count, int kind) {
  // kind 0/1: constant bits; kind 2: alternating 0,1,0,1,...
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(count));
  for (int t = 0; t < count; ++t) {
    bits[static_cast<std::size_t>(t)] =
        kind == 2 ? static_cast<std::uint8_t>(t & 1) : static_cast<std::uint8_t>(kind);
  }
  return bits;
}

constexpr int kRandomBits = -1;

/// Synthesizes one stream per block (fresh channel per block in random mode)
/// and hands it to `body`; block b's RNG key is derive2(seed, point, b).
void for_each_block(const ExperimentConfig& config, const SystemParams& params,
                    std::uint64_t point_index, long long blocks, int bits_kind,
                    const std::function<void(long long, SymbolStream&)>& body) {
  ChannelState fixed_channel{};
  const bool fixed = config.channel_mode == ChannelMode::fixed;
  if (fixed) {
    fixed_channel = derive_channel_state(config.h, config.f, config.g, params);
  }
  const int bit_count = params.symbols_per_block + 2;
  parallel_for(config.workers, blocks, [&](long long block) {
    const std::uint64_t block_key =
        rng::derive2(config.seed, point_index, static_cast<std::uint64_t>(block));
    ChannelState channel = fixed_channel;
    if (!fixed) {
      std::complex<double> h;
      std::complex<double> f;
      std::complex<double> g;
      random_channel_coefficients(block_key, h, f, g);
      channel = derive_channel_state(h, f, g, params);
    }
    const std::vector<std::uint8_t> bits = bits_kind == kRandomBits
                                               ? random_bits(bit_count, block_key)
                                               : pattern_bits(bit_count, bits_kind);
    SymbolStream stream = synthesize_stream(params, channel, bits, block_key);
    body(block, stream);
  });
}

Threshold analytic_threshold(ThresholdPolicy policy, const ChannelState& channel,
                             const SystemParams& params, const ExperimentConfig& config) {
  const int n = params.samples_per_symbol;
  const double n_a = static_cast<double>(params.rtse_magnitude);
  const double s0 = channel.sigma0_sq;
  const double s1 = channel.sigma1_sq;
  const bool psk = params.source_kind == SourceKind::psk;
  switch (policy) {
    case ThresholdPolicy::perfect_opt:
      return Threshold{psk ? detail::psk_opt_value(s0, s1, n, params.noise_power)
                           : detail::perfect_opt_value(s0, s1, n),
                       ThresholdProvenance::perfect_opt};
    case ThresholdPolicy::near_opt:
      return Threshold{psk ? detail::psk_near_opt_value(s0, s1, n, n_a, params.noise_power)
                           : detail::near_opt_value(s0, s1, n, n_a),
                       ThresholdProvenance::near_opt};
    case ThresholdPolicy::manual:
      return Threshold{config.manual_threshold, ThresholdProvenance::manual};
    case ThresholdPolicy::ml:
      throw config_error("the ml policy applies per adjacent-bit case; use the balance experiment");
    case ThresholdPolicy::estimated:
      throw config_error("the estimated policy is resolved per block, not analytically");
  }
  throw config_error("unknown threshold policy");
}

struct BlockTally {
  long long errors = 0;
  std::array<long long, 4> case_counts{};
  std::array<long long, 4> case_errors{};
  double gamma_hat = std::numeric_limits<double>::quiet_NaN();
  bool est_failed = false;
};

struct PointResult {
  long long symbols = 0;
  long long errors = 0;
  std::array<long long, 4> case_counts{};
  std::array<long long, 4> case_errors{};
  long long est_failures = 0;
  long long est_blocks = 0;
  double gamma_hat_mean = std::numeric_limits<double>::quiet_NaN();
};

/// Simulate one BER grid point: `trials` payload symbols (rounded up to whole
/// blocks) detected under the configured policy.
PointResult simulate_ber_point(const ExperimentConfig& config, const SystemParams& params,
                               std::uint64_t point_index) {
  const long long symbols_per_block = params.symbols_per_block;
  const long long blocks = (config.trials + symbols_per_block - 1) / symbols_per_block;
  std::vector<BlockTally> slots(static_cast<std::size_t>(blocks));

  const bool estimated = config.policy == ThresholdPolicy::estimated;
  Threshold fixed_threshold{};
  bool have_fixed_threshold = false;
  if (config.channel_mode == ChannelMode::fixed && !estimated) {
    const ChannelState channel = derive_channel_state(config.h, config.f, config.g, params);
    fixed_threshold = analytic_threshold(config.policy, channel, params, config);
    have_fixed_threshold = true;
  }

  for_each_block(config, params, point_index, blocks, kRandomBits,
                 [&](long long block, SymbolStream& stream) {
                   BlockTally& tally = slots[static_cast<std::size_t>(block)];
                   Threshold threshold{};
                   if (estimated) {
                     try {
                       const EstimatedParams estimate =
                           estimate_params(block_powers(stream), params.samples_per_symbol);
                       threshold = estimated_threshold(estimate, params);
                       tally.gamma_hat = threshold.value;
                     } catch (const estimation_error&) {
                       tally.est_failed = true;
                       threshold = analytic_threshold(ThresholdPolicy::near_opt,
                                                      stream.channel, params, config);
                     }
                   } else if (have_fixed_threshold) {
                     threshold = fixed_threshold;
                   } else {
                     threshold = analytic_threshold(config.policy, stream.channel, params, config);
                   }
                   const DetectionReport report = detect_block(stream, threshold);
                   tally.errors = report.error_count;
                   for (int i = 0; i < 2; ++i) {
                     for (int j = 0; j < 2; ++j) {
                       tally.case_counts[static_cast<std::size_t>(case_index(i, j))] =
                           report.case_counts[i][j];
                       tally.case_errors[static_cast<std::size_t>(case_index(i, j))] =
                           report.case_errors[i][j];
                     }
                   }
                 });

  PointResult out;
  out.symbols = blocks * symbols_per_block;
  double gamma_sum = 0.0;
  for (const BlockTally& tally : slots) {
    out.errors += tally.errors;
    for (std::size_t c = 0; c < 4; ++c) {
      out.case_counts[c] += tally.case_counts[c];
      out.case_errors[c] += tally.case_errors[c];
    }
    if (estimated) {
      if (tally.est_failed) {
        ++out.est_failures;
      } else {
        gamma_sum += tally.gamma_hat;
        ++out.est_blocks;
      }
    }
  }
  if (out.est_blocks > 0) {
    out.gamma_hat_mean = gamma_sum / static_cast<double>(out.est_blocks);
  }
  return out;
}

double safe_rate(long long errors, long long count) {
  return count > 0 ? static_cast<double>(errors) / static_cast<double>(count)
                   : std::numeric_limits<double>::quiet_NaN();
}

double binomial_se(double rate, long long count) {
  if (count <= 0 || !(rate >= 0.0) || rate > 1.0) {
    return std::numeric_limits<double>::quiet_NaN();
  }
  return std::sqrt(rate * (1.0 - rate) / static_cast<double>(count));
}

void sweep_header(CsvBuilder& csv) {
  for (const char* name :
       {"experiment", "snr_db", "eta_db", "n_samples", "n_symbols", "n_a", "rtse_sign",
        "source", "channel_mode", "policy", "threshold", "threshold_provenance", "trials",
        "errors", "empirical_ber", "std_error", "theory_exact", "theory_approx",
        "case00_count", "case00_errors", "case01_count", "case01_errors", "case10_count",
        "case10_errors", "case11_count", "case11_errors", "est_failures", "gamma_hat_mean",
        "h_re", "h_im", "f_re", "f_im", "g_re", "g_im", "sigma0_sq", "sigma1_sq", "seed"}) {
    csv.cell(name);
  }
  csv.end_row();
}

void sweep_row(CsvBuilder& csv, const char* experiment, const ExperimentConfig& config,
               const SystemParams& params, double snr_db_row, double eta_db_row,
               const PointResult& point) {
  const double nan = std::numeric_limits<double>::quiet_NaN();
  const bool fixed = config.channel_mode == ChannelMode::fixed;
  double threshold_value = nan;
  const char* provenance = "";
  double theory_exact = nan;
  double theory_approx = nan;
  ChannelState channel{};
  if (fixed) {
    channel = derive_channel_state(config.h, config.f, config.g, params);
  }
  if (config.policy == ThresholdPolicy::estimated) {
    threshold_value = point.gamma_hat_mean;
    provenance = provenance_name(ThresholdProvenance::near_opt_estimated);
  } else if (fixed) {
    const Threshold threshold = analytic_threshold(config.policy, channel, params, config);
    threshold_value = threshold.value;
    provenance = provenance_name(threshold.provenance);
  } else {
    provenance = config.policy == ThresholdPolicy::manual
                     ? provenance_name(ThresholdProvenance::manual)
                     : "per_block";
    if (config.policy == ThresholdPolicy::manual) threshold_value = config.manual_threshold;
  }
  if (fixed && std::isfinite(threshold_value)) {
    if (params.source_kind == SourceKind::psk) {
      theory_approx = psk_analytics(threshold_value, channel, params).psk_approx_ber.total;
    } else {
      theory_exact = exact_ber(threshold_value, channel, params).total;
      theory_approx = approx_ber(threshold_value, channel, params).total;
    }
  }
  const double ber = safe_rate(point.errors, point.symbols);
  csv.cell(experiment);
  csv.cell(snr_db_row);
  csv.cell(eta_db_row);
  csv.cell(params.samples_per_symbol);
  csv.cell(params.symbols_per_block);
  csv.cell(params.rtse_magnitude);
  csv.cell(sign_name(params.rtse_sign));
  csv.cell(source_name(params.source_kind));
  csv.cell(channel_mode_name(config.channel_mode));
  csv.cell(policy_name(config.policy));
  csv.cell(threshold_value);
  csv.cell(provenance);
  csv.cell(point.symbols);
  csv.cell(point.errors);
  csv.cell(ber);
  csv.cell(binomial_se(ber, point.symbols));
  csv.cell(theory_exact);
  csv.cell(theory_approx);
  for (int i = 0; i < 2; ++i) {
    for (int j = 0; j < 2; ++j) {
      const std::size_t c = static_cast<std::size_t>(case_index(i, j));
      csv.cell(point.case_counts[c]);
      csv.cell(point.case_errors[c]);
    }
  }
  csv.cell(point.est_failures);
  csv.cell(point.gamma_hat_mean);
  if (fixed) {
    csv.cell(config.h.real());
    csv.cell(config.h.imag());
    csv.cell(config.f.real());
    csv.cell(config.f.imag());
    csv.cell(config.g.real());
    csv.cell(config.g.imag());
    csv.cell(channel.sigma0_sq);
    csv.cell(channel.sigma1_sq);
  } else {
    for (int c = 0; c < 8; ++c) csv.cell(std::numeric_limits<double>::quiet_NaN());
  }
  csv.cell(config.seed);
  csv.end_row();
}

void require_ber_trials(const ExperimentConfig& config) {
  if (config.trials < kMinBerTrials) {
    throw config_error("BER experiments need trials >= 10000");
  }
}

void require_fixed_channel(const ExperimentConfig& config, const char* experiment) {
  if (config.channel_mode != ChannelMode::fixed) {
    throw config_error(std::string(experiment) + " requires channel_mode = fixed");
  }
}

void require_grid(bool non_empty, const char* name) {
  if (!non_empty) {
    throw config_error(std::string("missing required grid: ") + name);
  }
}

}  // namespace

// ---------------------------------------------------------------------------
// Public helpers.
// ---------------------------------------------------------------------------

const char* channel_mode_name(ChannelMode mode) {
  return mode == ChannelMode::fixed ? "fixed" : "random_per_trial";
}

const char* policy_name(ThresholdPolicy policy) {
  switch (policy) {
    case ThresholdPolicy::perfect_opt: return "perfect-opt";
    case ThresholdPolicy::near_opt: return "near-opt";
    case ThresholdPolicy::estimated: return "estimated";
    case ThresholdPolicy::ml: return "ml";
    case ThresholdPolicy::manual: return "manual";
  }
  return "?";
}

void ExperimentConfig::validate() const {
  if (n_samples < 2) throw config_error("n must be at least 2");
  if (n_symbols < 4 || n_symbols % 4 != 0)
    throw config_error("k must be a multiple of 4, at least 4");
  if (!(noise_power >= 0.0) || !std::isfinite(noise_power))
    throw config_error("noise_power must be finite and non-negative");
  if (!std::isfinite(snr_db) || !std::isfinite(eta_db))
    throw config_error("snr_db and eta_db must be finite");
  if (source == SourceKind::psk && psk_order < 2)
    throw config_error("psk_order must be at least 2");
  if (policy == ThresholdPolicy::manual && !std::isfinite(manual_threshold))
    throw config_error("manual policy needs a finite manual_threshold");
  if (trials < 1) throw config_error("trials must be positive");
  if (workers < 1) throw config_error("workers must be positive");
  if ((pdf_adjacent_bit != 0 && pdf_adjacent_bit != 1) ||
      (pdf_current_bit != 0 && pdf_current_bit != 1))
    throw config_error("pdf case bits must be 0 or 1");
  if (pdf_bins < 4) throw config_error("pdf_bins must be at least 4");
  if (pdf_windows < 100) throw config_error("pdf_windows must be at least 100");
  if (grid_points < 2) throw config_error("grid_points must be at least 2");
  if (estimator_seeds < 2) throw config_error("estimator_seeds must be at least 2");
  for (int n_a : n_a_grid) {
    if (n_a < 0) throw config_error("n_a values must be non-negative");
  }
}

SystemParams ExperimentConfig::make_params(int n_a) const {
  return make_params(n_a, snr_db, eta_db, n_samples, n_symbols);
}

SystemParams ExperimentConfig::make_params(int n_a, double snr_db_row, double eta_db_row,
                                           int n_samples_row, int n_symbols_row) const {
  if (n_a > 0 && rtse_sign == RtseSign::zero) {
    throw config_error("rtse_sign must be negative or positive when n_a > 0");
  }
  SystemParams params;
  params.samples_per_symbol = n_samples_row;
  params.symbols_per_block = n_symbols_row;
  params.noise_power = noise_power;
  params.source_power = noise_power * std::pow(10.0, snr_db_row / 10.0);
  params.bt_attenuation = {std::pow(10.0, -eta_db_row / 20.0), 0.0};
  params.rtse_magnitude = n_a;
  params.rtse_sign = n_a == 0 ? RtseSign::zero : rtse_sign;
  params.source_kind = source;
  params.psk_order = psk_order;
  try {
    params.validate();
  } catch (const std::exception& error) {
    throw config_error(error.what());
  }
  return params;
}

void apply_config_entry(ExperimentConfig& config, const std::string& raw_key,
                        const std::string& raw_value) {
  const std::string key = to_lower(trim(raw_key));
  const std::string value = trim(raw_value);
  if (key.empty()) throw config_error("empty configuration key");
  if (value.empty()) throw config_error("empty value for '" + key + "'");

  if (key == "n") {
    config.n_samples = static_cast<int>(parse_int(key, value));
  } else if (key == "k") {
    config.n_symbols = static_cast<int>(parse_int(key, value));
  } else if (key == "noise_power") {
    config.noise_power = parse_double(key, value);
  } else if (key == "source") {
    const std::string kind = to_lower(value);
    if (kind == "gaussian") {
      config.source = SourceKind::complex_gaussian;
    } else if (kind == "psk") {
      config.source = SourceKind::psk;
    } else {
      throw config_error("source must be 'gaussian' or 'psk'");
    }
  } else if (key == "psk_order") {
    config.psk_order = static_cast<int>(parse_int(key, value));
  } else if (key == "rtse_sign") {
    const std::string sign = to_lower(value);
    if (sign == "negative") {
      config.rtse_sign = RtseSign::negative;
    } else if (sign == "positive") {
      config.rtse_sign = RtseSign::positive;
    } else {
      throw config_error("rtse_sign must be 'negative' or 'positive'");
    }
  } else if (key == "snr_db") {
    config.snr_db = parse_double(key, value);
  } else if (key == "eta_db") {
    config.eta_db = parse_double(key, value);
  } else if (key == "snr_db_grid") {
    config.snr_db_grid = parse_double_list(key, value);
  } else if (key == "n_a_grid") {
    config.n_a_grid = parse_int_list(key, value);
  } else if (key == "n_grid") {
    config.n_grid = parse_int_list(key, value);
  } else if (key == "k_grid") {
    config.k_grid = parse_int_list(key, value);
  } else if (key == "eta_db_grid") {
    config.eta_db_grid = parse_double_list(key, value);
  } else if (key == "channel_mode") {
    const std::string mode = to_lower(value);
    if (mode == "fixed") {
      config.channel_mode = ChannelMode::fixed;
    } else if (mode == "random" || mode == "random_per_trial") {
      config.channel_mode = ChannelMode::random_per_trial;
    } else {
      throw config_error("channel_mode must be 'fixed' or 'random_per_trial'");
    }
  } else if (key == "h") {
    config.h = parse_complex(key, value);
  } else if (key == "f") {
    config.f = parse_complex(key, value);
  } else if (key == "g") {
    config.g = parse_complex(key, value);
  } else if (key == "policy") {
    const std::string policy = to_lower(value);
    if (policy == "perfect-opt") {
      config.policy = ThresholdPolicy::perfect_opt;
    } else if (policy == "near-opt") {
      config.policy = ThresholdPolicy::near_opt;
    } else if (policy == "estimated") {
      config.policy = ThresholdPolicy::estimated;
    } else if (policy == "ml") {
      config.policy = ThresholdPolicy::ml;
    } else if (policy == "manual") {
      config.policy = ThresholdPolicy::manual;
    } else {
      throw config_error(
          "policy must be one of perfect-opt, near-opt, estimated, ml, manual");
    }
  } else if (key == "manual_threshold") {
    config.manual_threshold = parse_double(key, value);
  } else if (key == "trials") {
    config.trials = parse_int(key, value);
  } else if (key == "seed") {
    config.seed = static_cast<std::uint64_t>(parse_int(key, value));
  } else if (key == "workers") {
    config.workers = static_cast<int>(parse_int(key, value));
  } else if (key == "out") {
    config.out_path = value;
  } else if (key == "pdf_adjacent_bit") {
    config.pdf_adjacent_bit = static_cast<int>(parse_int(key, value));
  } else if (key == "pdf_current_bit") {
    config.pdf_current_bit = static_cast<int>(parse_int(key, value));
  } else if (key == "pdf_bins") {
    config.pdf_bins = static_cast<int>(parse_int(key, value));
  } else if (key == "pdf_windows") {
    config.pdf_windows = parse_int(key, value);
  } else if (key == "grid_points") {
    config.grid_points = static_cast<int>(parse_int(key, value));
  } else if (key == "estimator_seeds") {
    config.estimator_seeds = static_cast<int>(parse_int(key, value));
  } else {
    throw config_error("unknown configuration key: " + key);
  }
}

ExperimentConfig parse_config_file(const std::string& path) {
  std::ifstream input(path);
  if (!input) {
    throw config_error("cannot open configuration file: " + path);
  }
  ExperimentConfig config;
  std::string line;
  int line_number = 0;
  while (std::getline(input, line)) {
    ++line_number;
    const std::size_t hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const std::string stripped = trim(line);
    if (stripped.empty()) continue;
    const std::size_t equals = stripped.find('=');
    if (equals == std::string::npos) {
      throw config_error(path + ":" + std::to_string(line_number) +
                         ": expected 'key = value'");
    }
    try {
      apply_config_entry(config, stripped.substr(0, equals), stripped.substr(equals + 1));
    } catch (const config_error& error) {
      throw config_error(path + ":" + std::to_string(line_number) + ": " + error.what());
    }
  }
  return config;
}

void parallel_for(int workers, long long count,
                  const std::function<void(long long)>& fn) {
  if (count <= 0) return;
  const int threads = static_cast<int>(std::min<long long>(std::max(workers, 1), count));
  if (threads <= 1) {
    for (long long index = 0; index < count; ++index) fn(index);
    return;
  }
  std::atomic<long long> next{0};
  std::mutex error_mutex;
  std::exception_ptr first_error;
  auto worker = [&]() {
    while (true) {
      const long long index = next.fetch_add(1, std::memory_order_relaxed);
      if (index >= count) break;
      try {
        fn(index);
      } catch (...) {
        std::lock_guard<std::mutex> lock(error_mutex);
        if (!first_error) first_error = std::current_exception();
        next.store(count, std::memory_order_relaxed);
        break;
      }
    }
  };
  std::vector<std::thread> pool;
  pool.reserve(static_cast<std::size_t>(threads));
  for (int t = 0; t < threads; ++t) pool.emplace_back(worker);
  for (std::thread& thread : pool) thread.join();
  if (first_error) std::rethrow_exception(first_error);
}

double kolmogorov_smirnov_gaussian(std::vector<double> values, double mean,
                                   double variance) {
  if (values.empty()) {
    throw std::domain_error("kolmogorov_smirnov_gaussian: empty sample");
  }
  if (!(variance > 0.0)) {
    throw std::domain_error("kolmogorov_smirnov_gaussian: variance must be positive");
  }
  std::sort(values.begin(), values.end());
  const double sd = std::sqrt(variance);
  const double count = static_cast<double>(values.size());
  double distance = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double cdf = 1.0 - q_function((values[i] - mean) / sd);
    const double lo = static_cast<double>(i) / count;
    const double hi = static_cast<double>(i + 1) / count;
    distance = std::max(distance, std::max(std::abs(hi - cdf), std::abs(cdf - lo)));
  }
  return distance;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::filesystem::path target(path);
  if (target.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(target.parent_path(), ec);
  }
  std::ofstream output(target, std::ios::binary | std::ios::trunc);
  if (!output) {
    throw std::runtime_error("cannot open output file: " + path);
  }
  output.write(content.data(), static_cast<std::streamsize>(content.size()));
  if (!output) {
    throw std::runtime_error("failed writing output file: " + path);
  }
}

// ---------------------------------------------------------------------------
// Experiments.
// ---------------------------------------------------------------------------

std::string run_ber_sweep(const ExperimentConfig& config) {
  config.validate();
  require_ber_trials(config);
  require_grid(!config.snr_db_grid.empty(), "snr_db_grid");
  require_grid(!config.n_a_grid.empty(), "n_a_grid");
  CsvBuilder csv;
  sweep_header(csv);
  std::uint64_t point = 0;
  for (double snr : config.snr_db_grid) {
    for (int n_a : config.n_a_grid) {
      const SystemParams params =
          config.make_params(n_a, snr, config.eta_db, config.n_samples, config.n_symbols);
      const PointResult result = simulate_ber_point(config, params, point);
      sweep_row(csv, "ber-sweep", config, params, snr, config.eta_db, result);
      ++point;
    }
  }
  return csv.text();
}

std::string run_n_sweep(const ExperimentConfig& config) {
  config.validate();
  require_ber_trials(config);
  require_grid(!config.n_grid.empty(), "n_grid");
  require_grid(!config.n_a_grid.empty(), "n_a_grid");
  CsvBuilder csv;
  sweep_header(csv);
  std::uint64_t point = 0;
  for (int n : config.n_grid) {
    for (int n_a : config.n_a_grid) {
      const SystemParams params =
          config.make_params(n_a, config.snr_db, config.eta_db, n, config.n_symbols);
      const PointResult result = simulate_ber_point(config, params, point);
      sweep_row(csv, "n-sweep", config, params, config.snr_db, config.eta_db, result);
      ++point;
    }
  }
  return csv.text();
}

std::string run_eta_sweep(const ExperimentConfig& config) {
  config.validate();
  require_ber_trials(config);
  require_grid(!config.eta_db_grid.empty(), "eta_db_grid");
  require_grid(!config.n_a_grid.empty(), "n_a_grid");
  CsvBuilder csv;
  sweep_header(csv);
  std::uint64_t point = 0;
  for (double eta : config.eta_db_grid) {
    for (int n_a : config.n_a_grid) {
      const SystemParams params =
          config.make_params(n_a, config.snr_db, eta, config.n_samples, config.n_symbols);
      const PointResult result = simulate_ber_point(config, params, point);
      sweep_row(csv, "eta-sweep", config, params, config.snr_db, eta, result);
      ++point;
    }
  }
  return csv.text();
}

std::string run_pdf_experiment(const ExperimentConfig& config) {
  config.validate();
  require_fixed_channel(config, "pdf experiment");
  require_grid(!config.n_a_grid.empty(), "n_a_grid");
  const int adjacent = config.pdf_adjacent_bit;
  const int current = config.pdf_current_bit;
  const SystemParams params = config.make_params(config.n_a_grid.front());
  const ChannelState channel = derive_channel_state(config.h, config.f, config.g, params);
  const int k_symbols = params.symbols_per_block;

  // Forced bit patterns: constant blocks produce pure cases; alternating
  // blocks produce both mixed cases on alternating payload indices.
  const bool mixed = adjacent != current;
  const int bits_kind = mixed ? 2 : adjacent;
  const int per_block = mixed ? k_symbols / 2 : k_symbols;
  const long long blocks = (config.pdf_windows + per_block - 1) / per_block;

  std::vector<std::vector<double>> slots(static_cast<std::size_t>(blocks));
  for_each_block(config, params, 0, blocks, bits_kind,
                 [&](long long block, SymbolStream& stream) {
                   std::vector<double>& energies = slots[static_cast<std::size_t>(block)];
                   energies.reserve(static_cast<std::size_t>(per_block));
                   for (int k = 1; k <= k_symbols; ++k) {
                     if (mixed && (k & 1) != current) continue;
                     energies.push_back(test_statistic(window(stream, k)));
                   }
                 });
  std::vector<double> energies;
  energies.reserve(static_cast<std::size_t>(blocks * per_block));
  for (const std::vector<double>& part : slots) {
    energies.insert(energies.end(), part.begin(), part.end());
  }

  const GaussianStat stat = gaussian_stats(channel, params)[static_cast<std::size_t>(
      case_index(adjacent, current))];
  const double sd = std::sqrt(stat.variance);
  const double ks = kolmogorov_smirnov_gaussian(energies, stat.mean, stat.variance);
  double empirical_mean = 0.0;
  for (double e : energies) empirical_mean += e;
  empirical_mean /= static_cast<double>(energies.size());

  const double lo = std::max(0.0, stat.mean - 5.0 * sd);
  const double hi = stat.mean + 5.0 * sd;
  const int bins = config.pdf_bins;
  const double width = (hi - lo) / bins;
  std::vector<long long> counts(static_cast<std::size_t>(bins), 0);
  for (double e : energies) {
    if (e < lo || e >= hi) continue;
    const int bin = std::min(bins - 1, static_cast<int>((e - lo) / width));
    ++counts[static_cast<std::size_t>(bin)];
  }
  const double total = static_cast<double>(energies.size());

  CsvBuilder csv;
  for (const char* name :
       {"experiment", "adjacent_bit", "current_bit", "n_samples", "n_a", "snr_db",
        "bin_lo", "bin_center", "bin_hi", "count", "empirical_density",
        "gaussian_density", "exact_density", "windows", "ks_distance",
        "empirical_mean", "model_mean", "model_sd", "seed"}) {
    csv.cell(name);
  }
  csv.end_row();
  const double inv_sqrt_2pi = 0.3989422804014327;
  for (int b = 0; b < bins; ++b) {
    const double bin_lo = lo + b * width;
    const double bin_hi = bin_lo + width;
    const double center = 0.5 * (bin_lo + bin_hi);
    const double z = (center - stat.mean) / sd;
    const double gaussian_density = inv_sqrt_2pi * std::exp(-0.5 * z * z) / sd;
    const double exact_density =
        exact_case_pdf(center, adjacent, current, channel, params);
    csv.cell("pdf");
    csv.cell(adjacent);
    csv.cell(current);
    csv.cell(params.samples_per_symbol);
    csv.cell(params.rtse_magnitude);
    csv.cell(config.snr_db);
    csv.cell(bin_lo);
    csv.cell(center);
    csv.cell(bin_hi);
    csv.cell(counts[static_cast<std::size_t>(b)]);
    csv.cell(static_cast<double>(counts[static_cast<std::size_t>(b)]) / (total * width));
    csv.cell(gaussian_density);
    csv.cell(exact_density);
    csv.cell(static_cast<long long>(energies.size()));
    csv.cell(ks);
    csv.cell(empirical_mean);
    csv.cell(stat.mean);
    csv.cell(sd);
    csv.cell(config.seed);
    csv.end_row();
  }
  return csv.text();
}

std::string run_threshold_table(const ExperimentConfig& config) {
  config.validate();
  require_ber_trials(config);
  require_fixed_channel(config, "threshold table");
  require_grid(!config.n_a_grid.empty(), "n_a_grid");

  CsvBuilder csv;
  for (const char* name :
       {"experiment", "n_a", "gamma", "errors", "trials", "empirical_ber", "std_error",
        "gamma_perfect", "gamma_near_opt", "ber_at_perfect", "ber_at_near_opt",
        "improvement_pct", "argmin_gamma", "argmin_ber", "argmin_gap_pct",
        "gamma_estimated_mean", "gamma_diff_pct", "est_failures", "seed"}) {
    csv.cell(name);
  }
  csv.end_row();

  std::uint64_t point = 0;
  for (int n_a : config.n_a_grid) {
    const SystemParams params = config.make_params(n_a);
    const ChannelState channel = derive_channel_state(config.h, config.f, config.g, params);
    const Threshold perfect =
        analytic_threshold(ThresholdPolicy::perfect_opt, channel, params, config);
    const Threshold near =
        analytic_threshold(ThresholdPolicy::near_opt, channel, params, config);

    const int grid_count = config.grid_points;
    const double lo = params.samples_per_symbol * channel.sigma_min_sq;
    const double hi = params.samples_per_symbol * channel.sigma_max_sq;
    std::vector<double> gammas(static_cast<std::size_t>(grid_count));
    for (int g = 0; g < grid_count; ++g) {
      gammas[static_cast<std::size_t>(g)] =
          lo + (hi - lo) * static_cast<double>(g) / static_cast<double>(grid_count - 1);
    }
    // The two analytic thresholds ride along as extra evaluation points.
    gammas.push_back(perfect.value);
    gammas.push_back(near.value);
    const std::size_t eval_count = gammas.size();
    std::vector<Threshold> eval_thresholds(eval_count);
    for (std::size_t g = 0; g < eval_count; ++g) {
      eval_thresholds[g] = Threshold{gammas[g], ThresholdProvenance::manual};
    }

    const long long k_symbols = params.symbols_per_block;
    const long long blocks = (config.trials + k_symbols - 1) / k_symbols;

    struct TableTally {
      std::vector<long long> errors;
      double gamma_hat = std::numeric_limits<double>::quiet_NaN();
      double gamma_rel_dev = std::numeric_limits<double>::quiet_NaN();
      bool est_failed = false;
    };
    std::vector<TableTally> slots(static_cast<std::size_t>(blocks));

    for_each_block(config, params, point, blocks, kRandomBits,
                   [&](long long block, SymbolStream& stream) {
                     TableTally& tally = slots[static_cast<std::size_t>(block)];
                     tally.errors.assign(eval_count, 0);
                     const bool order_flag = stream.channel.order_flag;
                     for (int k = 1; k <= static_cast<int>(k_symbols); ++k) {
                       const double energy = test_statistic(window(stream, k));
                       const int truth = stream.bits[static_cast<std::size_t>(k)];
                       for (std::size_t g = 0; g < eval_count; ++g) {
                         const int decoded = decide(energy, eval_thresholds[g], order_flag);
                         if (decoded != truth) ++tally.errors[g];
                       }
                     }
                     try {
                       const EstimatedParams estimate = estimate_params(
                           block_powers(stream), params.samples_per_symbol);
                       tally.gamma_hat = estimated_threshold(estimate, params).value;
                       tally.gamma_rel_dev =
                           std::abs(tally.gamma_hat - near.value) / near.value;
                     } catch (const estimation_error&) {
                       tally.est_failed = true;
                     }
                   });

    std::vector<long long> errors(eval_count, 0);
    long long est_failures = 0;
    long long est_blocks = 0;
    double gamma_hat_sum = 0.0;
    double gamma_dev_sum = 0.0;
    for (const TableTally& tally : slots) {
      for (std::size_t g = 0; g < eval_count; ++g) errors[g] += tally.errors[g];
      if (tally.est_failed) {
        ++est_failures;
      } else {
        gamma_hat_sum += tally.gamma_hat;
        gamma_dev_sum += tally.gamma_rel_dev;
        ++est_blocks;
      }
    }
    const long long symbols = blocks * k_symbols;
    const double nan = std::numeric_limits<double>::quiet_NaN();
    const double gamma_hat_mean =
        est_blocks > 0 ? gamma_hat_sum / static_cast<double>(est_blocks) : nan;
    const double gamma_diff_pct =
        est_blocks > 0 ? 100.0 * gamma_dev_sum / static_cast<double>(est_blocks) : nan;

    // Grid argmin with ties broken to the median tied index (flat zero-error
    // plateaus otherwise pin to the leftmost grid point).
    long long best = errors[0];
    for (int g = 1; g < grid_count; ++g) {
      best = std::min(best, errors[static_cast<std::size_t>(g)]);
    }
    std::vector<int> tied;
    for (int g = 0; g < grid_count; ++g) {
      if (errors[static_cast<std::size_t>(g)] == best) tied.push_back(g);
    }
    const int argmin_index = tied[tied.size() / 2];
    const double argmin_gamma = gammas[static_cast<std::size_t>(argmin_index)];
    const double argmin_ber =
        static_cast<double>(errors[static_cast<std::size_t>(argmin_index)]) /
        static_cast<double>(symbols);
    const double argmin_gap_pct =
        100.0 * std::abs(argmin_gamma - near.value) / near.value;

    const double ber_at_perfect =
        static_cast<double>(errors[eval_count - 2]) / static_cast<double>(symbols);
    const double ber_at_near =
        static_cast<double>(errors[eval_count - 1]) / static_cast<double>(symbols);
    const double improvement_pct =
        ber_at_perfect > 0.0
            ? 100.0 * (ber_at_perfect - ber_at_near) / ber_at_perfect
            : nan;

    for (int g = 0; g < grid_count; ++g) {
      const double ber =
          static_cast<double>(errors[static_cast<std::size_t>(g)]) /
          static_cast<double>(symbols);
      csv.cell("threshold-table");
      csv.cell(n_a);
      csv.cell(gammas[static_cast<std::size_t>(g)]);
      csv.cell(errors[static_cast<std::size_t>(g)]);
      csv.cell(symbols);
      csv.cell(ber);
      csv.cell(binomial_se(ber, symbols));
      csv.cell(perfect.value);
      csv.cell(near.value);
      csv.cell(ber_at_perfect);
      csv.cell(ber_at_near);
      csv.cell(improvement_pct);
      csv.cell(argmin_gamma);
      csv.cell(argmin_ber);
      csv.cell(argmin_gap_pct);
      csv.cell(gamma_hat_mean);
      csv.cell(gamma_diff_pct);
      csv.cell(est_failures);
      csv.cell(config.seed);
      csv.end_row();
    }
    ++point;
  }
  return csv.text();
}

std::string run_estimator_accuracy(const ExperimentConfig& config) {
  config.validate();
  require_fixed_channel(config, "estimator accuracy");
  require_grid(!config.n_grid.empty(), "n_grid");
  require_grid(!config.k_grid.empty(), "k_grid");
  require_grid(!config.n_a_grid.empty(), "n_a_grid");

  CsvBuilder csv;
  for (const char* name :
       {"experiment", "n_samples", "n_symbols", "n_a", "seeds", "failures",
        "mean_abs_na_error", "mean_na_hat", "gamma_true", "mean_gamma_hat",
        "mean_gamma_diff_pct", "mean_sigma_min_hat", "mean_sigma_max_hat", "seed"}) {
    csv.cell(name);
  }
  csv.end_row();

  std::uint64_t point = 0;
  for (int n : config.n_grid) {
    for (int k : config.k_grid) {
      for (int n_a : config.n_a_grid) {
        const SystemParams params =
            config.make_params(n_a, config.snr_db, config.eta_db, n, k);
        const ChannelState channel =
            derive_channel_state(config.h, config.f, config.g, params);
        const Threshold near =
            analytic_threshold(ThresholdPolicy::near_opt, channel, params, config);

        struct SeedTally {
          double abs_na_error = 0.0;
          double na_hat = 0.0;
          double gamma_hat = 0.0;
          double gamma_rel_dev = 0.0;
          double sigma_min_hat = 0.0;
          double sigma_max_hat = 0.0;
          bool failed = false;
        };
        const long long seeds = config.estimator_seeds;
        std::vector<SeedTally> slots(static_cast<std::size_t>(seeds));
        for_each_block(config, params, point, seeds, kRandomBits,
                       [&](long long seed_index, SymbolStream& stream) {
                         SeedTally& tally = slots[static_cast<std::size_t>(seed_index)];
                         try {
                           const EstimatedParams estimate = estimate_params(
                               block_powers(stream), params.samples_per_symbol);
                           const Threshold gamma_hat =
                               estimated_threshold(estimate, params);
                           tally.na_hat = estimate.n_a_hat;
                           tally.abs_na_error =
                               std::abs(estimate.n_a_hat - static_cast<double>(n_a));
                           tally.gamma_hat = gamma_hat.value;
                           tally.gamma_rel_dev =
                               std::abs(gamma_hat.value - near.value) / near.value;
                           tally.sigma_min_hat = estimate.sigma_min_hat_sq;
                           tally.sigma_max_hat = estimate.sigma_max_hat_sq;
                         } catch (const estimation_error&) {
                           tally.failed = true;
                         }
                       });

        long long failures = 0;
        long long ok = 0;
        double sum_abs = 0.0;
        double sum_na = 0.0;
        double sum_gamma = 0.0;
        double sum_dev = 0.0;
        double sum_smin = 0.0;
        double sum_smax = 0.0;
        for (const SeedTally& tally : slots) {
          if (tally.failed) {
            ++failures;
            continue;
          }
          ++ok;
          sum_abs += tally.abs_na_error;
          sum_na += tally.na_hat;
          sum_gamma += tally.gamma_hat;
          sum_dev += tally.gamma_rel_dev;
          sum_smin += tally.sigma_min_hat;
          sum_smax += tally.sigma_max_hat;
        }
        const double nan = std::numeric_limits<double>::quiet_NaN();
        const double denom = ok > 0 ? static_cast<double>(ok) : nan;
        csv.cell("estimator-accuracy");
        csv.cell(n);
        csv.cell(k);
        csv.cell(n_a);
        csv.cell(seeds);
        csv.cell(failures);
        csv.cell(sum_abs / denom);
        csv.cell(sum_na / denom);
        csv.cell(near.value);
        csv.cell(sum_gamma / denom);
        csv.cell(100.0 * sum_dev / denom);
        csv.cell(sum_smin / denom);
        csv.cell(sum_smax / denom);
        csv.cell(config.seed);
        csv.end_row();
        ++point;
      }
    }
  }
  return csv.text();
}

std::string run_balance_experiment(const ExperimentConfig& config) {
  config.validate();
  require_ber_trials(config);
  require_fixed_channel(config, "balance experiment");
  require_grid(!config.n_a_grid.empty(), "n_a_grid");
  if (config.source != SourceKind::complex_gaussian) {
    throw config_error("balance experiment applies to the gaussian source");
  }
  const int n_a = config.n_a_grid.front();
  if (n_a < 1) {
    throw config_error("balance experiment needs n_a >= 1");
  }
  const SystemParams params = config.make_params(n_a);
  const ChannelState channel = derive_channel_state(config.h, config.f, config.g, params);
  const ConditionalThresholds balanced = conditional_opt_thresholds(channel, params);
  const ConditionalThresholds ml = ml_conditional_thresholds(channel, params);
  const Threshold near = near_opt_threshold(channel, params);
  // Threshold list: per-case balanced pair, per-case ML pair, single
  // misalignment-aware value (applied to both adjacent cases).
  const std::array<double, 5> thresholds{balanced.ip0, balanced.ip1, ml.ip0, ml.ip1,
                                         near.value};
  std::array<Threshold, 5> eval_thresholds{};
  for (std::size_t t = 0; t < thresholds.size(); ++t) {
    eval_thresholds[t] = Threshold{thresholds[t], ThresholdProvenance::manual};
  }

  const int k_symbols = params.symbols_per_block;
  struct BalanceTally {
    std::array<std::array<long long, 4>, 5> counts{};
    std::array<std::array<long long, 4>, 5> errors{};
  };

  // Three forced patterns: constant 0 -> case (0,0); constant 1 -> (1,1);
  // alternating -> (0,1) and (1,0) on alternating payload indices.
  BalanceTally total{};
  std::uint64_t point = 0;
  for (int pattern : {0, 1, 2}) {
    const int per_block_cases = pattern == 2 ? k_symbols / 2 : k_symbols;
    const long long blocks = (config.trials + per_block_cases - 1) / per_block_cases;
    std::vector<BalanceTally> slots(static_cast<std::size_t>(blocks));
    for_each_block(config, params, point, blocks, pattern,
                   [&](long long block, SymbolStream& stream) {
                     BalanceTally& tally = slots[static_cast<std::size_t>(block)];
                     const bool order_flag = stream.channel.order_flag;
                     for (int k = 1; k <= k_symbols; ++k) {
                       const double energy = test_statistic(window(stream, k));
                       const int truth = stream.bits[static_cast<std::size_t>(k)];
                       const int adjacent =
                           stream.bits[static_cast<std::size_t>(
                               adjacent_symbol_index(params, k))];
                       const std::size_t c =
                           static_cast<std::size_t>(case_index(adjacent, truth));
                       for (std::size_t t = 0; t < thresholds.size(); ++t) {
                         ++tally.counts[t][c];
                         if (decide(energy, eval_thresholds[t], order_flag) != truth) {
                           ++tally.errors[t][c];
                         }
                       }
                     }
                   });
    for (const BalanceTally& tally : slots) {
      for (std::size_t t = 0; t < thresholds.size(); ++t) {
        for (std::size_t c = 0; c < 4; ++c) {
          total.counts[t][c] += tally.counts[t][c];
          total.errors[t][c] += tally.errors[t][c];
        }
      }
    }
    ++point;
  }

  CsvBuilder csv;
  for (const char* name :
       {"experiment", "policy", "adjacent_bit", "gamma", "n_a", "count_bit0",
        "errors_bit0", "rate_decide1_given_bit0", "se_bit0", "count_bit1", "errors_bit1",
        "rate_decide0_given_bit1", "se_bit1", "gap", "theory_rate_bit0",
        "theory_rate_bit1", "seed"}) {
    csv.cell(name);
  }
  csv.end_row();

  struct RowSpec {
    const char* policy;
    int adjacent;
    std::size_t threshold_index;
  };
  const std::array<RowSpec, 6> rows{{{"balanced-conditional", 0, 0},
                                     {"balanced-conditional", 1, 1},
                                     {"ml-conditional", 0, 2},
                                     {"ml-conditional", 1, 3},
                                     {"near-opt", 0, 4},
                                     {"near-opt", 1, 4}}};
  for (const RowSpec& row : rows) {
    const std::size_t case0 = static_cast<std::size_t>(case_index(row.adjacent, 0));
    const std::size_t case1 = static_cast<std::size_t>(case_index(row.adjacent, 1));
    const long long count0 = total.counts[row.threshold_index][case0];
    const long long count1 = total.counts[row.threshold_index][case1];
    const long long err0 = total.errors[row.threshold_index][case0];
    const long long err1 = total.errors[row.threshold_index][case1];
    const double rate0 = safe_rate(err0, count0);
    const double rate1 = safe_rate(err1, count1);
    const std::array<double, 2> theory = conditional_error_rates(
        thresholds[row.threshold_index], row.adjacent, channel, params);
    csv.cell("balance");
    csv.cell(row.policy);
    csv.cell(row.adjacent);
    csv.cell(thresholds[row.threshold_index]);
    csv.cell(n_a);
    csv.cell(count0);
    csv.cell(err0);
    csv.cell(rate0);
    csv.cell(binomial_se(rate0, count0));
    csv.cell(count1);
    csv.cell(err1);
    csv.cell(rate1);
    csv.cell(binomial_se(rate1, count1));
    csv.cell(std::abs(rate0 - rate1));
    csv.cell(theory[0]);
    csv.cell(theory[1]);
    csv.cell(config.seed);
    csv.end_row();
  }
  return csv.text();
}

std::string run_floor_experiment(const ExperimentConfig& config) {
  config.validate();
  require_fixed_channel(config, "floor experiment");
  require_grid(!config.n_a_grid.empty(), "n_a_grid");
  if (config.source != SourceKind::complex_gaussian) {
    throw config_error("floor experiment applies to the gaussian source");
  }
  const double extreme_snr_db = 10.0 * std::log10(kExtremeSnrLinear);
  CsvBuilder csv;
  for (const char* name :
       {"experiment", "n_a", "n_samples", "floor", "approx_ber_extreme_snr", "abs_diff",
        "extreme_snr_db", "seed"}) {
    csv.cell(name);
  }
  csv.end_row();
  for (int n_a : config.n_a_grid) {
    const SystemParams params = config.make_params(n_a);
    const ChannelState channel = derive_channel_state(config.h, config.f, config.g, params);
    const double floor = ber_floor(channel, params);

    const SystemParams params_hi = config.make_params(
        n_a, extreme_snr_db, config.eta_db, config.n_samples, config.n_symbols);
    const ChannelState channel_hi =
        derive_channel_state(config.h, config.f, config.g, params_hi);
    const Threshold near =
        analytic_threshold(ThresholdPolicy::near_opt, channel_hi, params_hi, config);
    const double approx = approx_ber(near.value, channel_hi, params_hi).total;

    csv.cell("floor");
    csv.cell(n_a);
    csv.cell(params.samples_per_symbol);
    csv.cell(floor);
    csv.cell(approx);
    csv.cell(std::abs(approx - floor));
    csv.cell(extreme_snr_db);
    csv.cell(config.seed);
    csv.end_row();
  }
  return csv.text();
}

}  // namespace ambc

#pragma once
// Monte Carlo experiment runner: sweeps configurations over SNR / window
// length / attenuation / misalignment grids, validates the analytics against
// simulation, and emits plot-ready CSV. Deterministic for a given seed
// regardless of worker count: every block derives its RNG key from
// (master seed, grid-point index, block index) and partial results are
// reduced in block order.

#include <complex>
#include <cstdint>
#include <functional>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "ambc/model.hpp"

namespace ambc {

/// Raised for malformed configuration files, flags, or field combinations.
class config_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Whether every block reuses one channel realization or draws fresh
/// coefficients (h, f, g ~ CN(0,1)) per block with matching genie thresholds.
enum class ChannelMode { fixed, random_per_trial };

/// How the detection threshold is chosen for simulated blocks.
enum class ThresholdPolicy { perfect_opt, near_opt, estimated, ml, manual };

const char* channel_mode_name(ChannelMode mode);
const char* policy_name(ThresholdPolicy policy);

struct ExperimentConfig {
  // Waveform / link parameters (scalars; grids below override per row).
  int n_samples = 100;        ///< N, samples per symbol
  int n_symbols = 100;        ///< K, payload symbols per block
  double noise_power = 1.0;   ///< per-sample noise power
  SourceKind source = SourceKind::complex_gaussian;
  int psk_order = 4;
  RtseSign rtse_sign = RtseSign::negative;  ///< sign applied to nonzero n_a
  double snr_db = 20.0;       ///< source power / noise power, in dB
  double eta_db = 1.1;        ///< tag attenuation in dB (|eta| = 10^(-dB/20))

  ChannelMode channel_mode = ChannelMode::fixed;
  std::complex<double> h{1.0, 0.0};
  std::complex<double> f{1.0, 0.0};
  std::complex<double> g{1.0, 0.0};

  // Sweep grids; each experiment documents which grids it requires.
  std::vector<double> snr_db_grid{};
  std::vector<int> n_a_grid{};
  std::vector<int> n_grid{};
  std::vector<int> k_grid{};
  std::vector<double> eta_db_grid{};

  ThresholdPolicy policy = ThresholdPolicy::near_opt;
  double manual_threshold = std::numeric_limits<double>::quiet_NaN();

  long long trials = 1000000;  ///< payload symbols per grid point (rounded up to blocks)
  std::uint64_t seed = 1;
  int workers = 1;
  std::string out_path;

  // pdf experiment controls.
  int pdf_adjacent_bit = 1;
  int pdf_current_bit = 0;
  int pdf_bins = 60;
  long long pdf_windows = 100000;

  // threshold-table grid search and estimator repetitions.
  int grid_points = 40;
  int estimator_seeds = 100;

  /// Field-level sanity (positivity, bit flags, policy/value pairing).
  /// Throws config_error.
  void validate() const;

  /// Builds per-row system parameters at this configuration's scalar
  /// operating point with the given misalignment.
  SystemParams make_params(int n_a) const;

  /// Same, with every swept quantity overridden.
  SystemParams make_params(int n_a, double snr_db_row, double eta_db_row,
                           int n_samples_row, int n_symbols_row) const;
};

/// Parse a key = value configuration file (# starts a comment). Unknown keys
/// and unparsable values raise config_error.
ExperimentConfig parse_config_file(const std::string& path);

/// Apply one key/value pair (the config-file grammar) to a configuration;
/// CLI flag overrides reuse this. Throws config_error.
void apply_config_entry(ExperimentConfig& config, const std::string& key,
                        const std::string& value);

// Each experiment returns the complete CSV text (header + one row per grid
// point) and is deterministic in (config, seed) for any worker count.

/// BER versus SNR, one row per (snr_db_grid x n_a_grid) point.
std::string run_ber_sweep(const ExperimentConfig& config);

/// BER versus samples-per-symbol, one row per (n_grid x n_a_grid) point.
std::string run_n_sweep(const ExperimentConfig& config);

/// BER versus tag attenuation, one row per (eta_db_grid x n_a_grid) point.
std::string run_eta_sweep(const ExperimentConfig& config);

/// Histogram of window energies for one forced (adjacent, current) case with
/// the Gaussian-model and exact densities at bin centers, plus the
/// Kolmogorov-Smirnov distance between the empirical CDF and the Gaussian.
std::string run_pdf_experiment(const ExperimentConfig& config);

/// Per-misalignment threshold study: empirical BER over a threshold grid
/// (plus the perfect-timing and misalignment-aware analytic values), the
/// grid-search argmin, the mean blind-estimated threshold, and their
/// relative gaps. One row per (n_a_grid x threshold grid point).
std::string run_threshold_table(const ExperimentConfig& config);

/// Blind-estimator accuracy over repeated blocks: mean |n_a_hat - n_a| and
/// mean relative threshold deviation, one row per
/// (n_grid x k_grid x n_a_grid) point.
std::string run_estimator_accuracy(const ExperimentConfig& config);

/// Conditional error rates under forced adjacent bits for the balanced
/// per-case thresholds, the misalignment-aware threshold, and the
/// maximum-likelihood thresholds.
std::string run_balance_experiment(const ExperimentConfig& config);

/// High-SNR limit check: the analytic BER floor against the Gaussian-model
/// BER evaluated at extreme SNR, one row per n_a_grid entry.
std::string run_floor_experiment(const ExperimentConfig& config);

/// Kolmogorov-Smirnov distance between the sample set and a Gaussian with
/// the given moments.
double kolmogorov_smirnov_gaussian(std::vector<double> values, double mean,
                                   double variance);

/// Run fn(0..count-1) across `workers` threads (inline when workers <= 1).
/// Tasks must only touch their own output slots; the first exception thrown
/// by any task is rethrown after all threads join.
void parallel_for(int workers, long long count,
                  const std::function<void(long long)>& fn);

/// Write content to path, creating parent directories if needed.
void write_text_file(const std::string& path, const std::string& content);

}  // namespace ambc

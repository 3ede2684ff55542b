#pragma once
// Blind estimation of the two per-sample energy levels and the timing
// misalignment from the sorted per-window average powers of one received
// block, plus construction of a detection threshold from those estimates.

#include <array>
#include <stdexcept>
#include <vector>

#include "ambc/detector.hpp"
#include "ambc/model.hpp"

namespace ambc {

/// Raised when a block is uninformative for estimation (e.g. all window
/// powers identical, or an estimated variance degenerates).
class estimation_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Estimates recovered from one block of misaligned window powers.
struct EstimatedParams {
  double sigma_min_hat_sq = 0.0;   ///< smaller per-sample energy level
  double sigma_max_hat_sq = 0.0;   ///< larger per-sample energy level
  double n_a_hat = 0.0;            ///< misalignment magnitude, in samples
  std::array<double, 4> quartile_means{};  ///< sorted-power quartile averages
};

/// Average power of each payload window: the window energy divided by the
/// samples per symbol, one value per payload symbol.
std::vector<double> block_powers(const SymbolStream& stream);

/// Sort the window powers, average them by quartile, and read off the two
/// energy levels (outer quartiles) and the misalignment magnitude (spread of
/// the inner quartiles relative to the outer ones). Requires at least 8
/// powers in a multiple of 4; throws estimation_error when the block carries
/// no level separation.
EstimatedParams estimate_params(const std::vector<double>& powers, int N);

/// Misalignment-aware threshold evaluated at the estimated quantities; for a
/// PSK source the per-sample energy variances are rebuilt from the configured
/// noise power.
Threshold estimated_threshold(const EstimatedParams& estimate,
                              const SystemParams& params);

}  // namespace ambc

#pragma once
// System parameters, channel state, and synthesis of the receiver's complex
// sample stream. A transmission block carries K payload symbols framed by one
// guard symbol on each side; the receiver's detection window for a payload
// symbol can be shifted left or right by a residual misalignment of
// rtse_magnitude samples, so up to that many samples of an adjacent symbol
// leak into the window.

#include <complex>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace ambc {

/// Direction of the residual timing offset between the tag's symbol
/// boundaries and the receiver's sampling windows.
enum class RtseSign { negative, zero, positive };

/// Ambient source signal family.
enum class SourceKind { complex_gaussian, psk };

struct SystemParams {
  int samples_per_symbol = 100;             ///< N, samples per tag symbol
  int symbols_per_block = 100;              ///< K, payload symbols per block
  double source_power = 100.0;              ///< P_s, per-sample source power
  double noise_power = 1.0;                 ///< N_w, receiver noise power
  std::complex<double> bt_attenuation{1.0, 0.0};  ///< eta, tag reflection gain
  int rtse_magnitude = 0;                   ///< n_a = |offset| in samples
  RtseSign rtse_sign = RtseSign::zero;
  SourceKind source_kind = SourceKind::complex_gaussian;
  int psk_order = 4;                        ///< M, constellation size for psk

  /// Throws std::domain_error when any invariant is violated:
  /// N >= 2; K >= 4 and divisible by 4; powers finite and nonnegative;
  /// 0 <= n_a < N/2; n_a = 0 exactly when rtse_sign is zero; M >= 2 for psk.
  void validate() const;
};

/// Channel coefficients and the per-sample receive powers they induce.
/// Bit 0: the tag absorbs, the receiver sees only the direct path h.
/// Bit 1: the tag reflects, the receiver sees mu = h + eta*f*g.
struct ChannelState {
  std::complex<double> h{};   ///< source -> receiver
  std::complex<double> f{};   ///< source -> tag
  std::complex<double> g{};   ///< tag -> receiver
  std::complex<double> mu{};  ///< h + eta*f*g
  double sigma0_sq = 0.0;     ///< |h|^2 P_s + N_w
  double sigma1_sq = 0.0;     ///< |mu|^2 P_s + N_w
  double sigma_min_sq = 0.0;
  double sigma_max_sq = 0.0;
  double xi0 = 0.0;           ///< N_w (2 sigma0^2 - N_w), psk energy variance
  double xi1 = 0.0;           ///< N_w (2 sigma1^2 - N_w)
  double xi_min = 0.0;
  double xi_max = 0.0;
  bool order_flag = true;     ///< true iff sigma0^2 <= sigma1^2
};

/// Populates every derived field from (h, f, g) and the system parameters.
/// Throws std::domain_error for non-finite inputs.
ChannelState derive_channel_state(std::complex<double> h,
                                  std::complex<double> f,
                                  std::complex<double> g,
                                  const SystemParams& params);

/// Ground-truth tag bits plus the contiguous sample stream they produce.
/// bits has length K+2 (payload bits at indices 1..K, guards at 0 and K+1);
/// samples has length (K+2)*N.
struct SymbolStream {
  SystemParams params;
  ChannelState channel;
  std::vector<std::uint8_t> bits;
  std::vector<std::complex<double>> samples;
  std::uint64_t seed = 0;
};

/// Equiprobable i.i.d. bits, deterministic in the seed.
std::vector<std::uint8_t> random_bits(int count, std::uint64_t seed);

/// Draws one complex sample h', f', g' ~ CN(0,1) each, deterministic in the
/// seed; used by the harness's random-channel mode.
void random_channel_coefficients(std::uint64_t seed, std::complex<double>& h,
                                 std::complex<double>& f,
                                 std::complex<double>& g);

/// Synthesizes the receiver's sample stream for the given bits. Each sample
/// of symbol slot t is c*s(n) + w(n) with c = h or mu by bits[t], s(n) the
/// source sample (complex Gaussian of power P_s, or a P_s-power PSK symbol
/// uniform over the constellation, redrawn every sample), and w(n) complex
/// Gaussian noise of power N_w. The generator is keyed per (seed, slot,
/// sample), so a stream is reproducible sample-by-sample and a slot's samples
/// do not depend on other slots' bits.
/// Throws std::domain_error when bits has the wrong length or non-binary
/// entries.
SymbolStream synthesize_stream(const SystemParams& params,
                               const ChannelState& channel,
                               const std::vector<std::uint8_t>& bits,
                               std::uint64_t seed);

/// Same as synthesize_stream but reuses the stream's buffers (params and
/// channel are kept); avoids reallocation in Monte Carlo loops.
void resynthesize_stream(SymbolStream& stream,
                         const std::vector<std::uint8_t>& bits,
                         std::uint64_t seed);

/// The receiver's N-sample detection window for payload symbol k (1..K):
/// shifted left by n_a samples when rtse_sign is negative (the window begins
/// inside symbol k-1), right by n_a when positive (it ends inside symbol
/// k+1), aligned when zero. Throws std::out_of_range for k outside 1..K.
std::span<const std::complex<double>> window(const SymbolStream& stream, int k);

/// Index of the symbol whose samples can leak into payload window k:
/// k-1 for a negative offset, k+1 for positive. For zero offset (no leakage)
/// the previous symbol is returned as the bookkeeping label.
int adjacent_symbol_index(const SystemParams& params, int k);

/// Debug dump: interleaved re,im float64 pairs, one pair per sample.
/// Not a stability contract.
void dump_stream(const SymbolStream& stream, const std::string& path);

}  // namespace ambc

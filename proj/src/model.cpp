#include "ambc/model.hpp"

#include <cmath>
#include <fstream>
#include <numbers>
#include <stdexcept>

#include "ambc/rng.hpp"

namespace ambc {

namespace {

// Domain separators so bit generation, channel draws, and sample synthesis
// never share a key stream.
constexpr std::uint64_t kBitsDomain = 0xb175;
constexpr std::uint64_t kChannelDomain = 0xc44e;
constexpr std::uint64_t kSampleDomain = 0x5a3c;

void check_finite(std::complex<double> z, const char* name) {
  if (!std::isfinite(z.real()) || !std::isfinite(z.imag())) {
    throw std::domain_error(std::string(name) + " must be finite");
  }
}

void check_bits(const std::vector<std::uint8_t>& bits, int expected) {
  if (static_cast<int>(bits.size()) != expected) {
    throw std::domain_error("bits must have length K+2 (payload plus guards)");
  }
  for (std::uint8_t b : bits) {
    if (b > 1) throw std::domain_error("bit values must be 0 or 1");
  }
}

void fill_samples(SymbolStream& stream) {
  const SystemParams& p = stream.params;
  const int n_per_symbol = p.samples_per_symbol;
  const int total_slots = p.symbols_per_block + 2;
  stream.samples.resize(static_cast<std::size_t>(total_slots) * n_per_symbol);

  const double noise_scale = std::sqrt(p.noise_power / 2.0);
  const double gauss_scale = std::sqrt(p.source_power / 2.0);
  const double psk_amplitude = std::sqrt(p.source_power);
  const double phase_step =
      2.0 * std::numbers::pi_v<double> / static_cast<double>(p.psk_order);
  const std::complex<double> coef[2] = {stream.channel.h, stream.channel.mu};

  for (int t = 0; t < total_slots; ++t) {
    const std::complex<double> c = coef[stream.bits[t]];
    const std::uint64_t slot_key = rng::derive2(stream.seed, kSampleDomain,
                                                static_cast<std::uint64_t>(t));
    std::complex<double>* out = stream.samples.data() +
                                static_cast<std::size_t>(t) * n_per_symbol;
    for (int n = 0; n < n_per_symbol; ++n) {
      rng::Stream rs(rng::derive(slot_key, static_cast<std::uint64_t>(n)));
      std::complex<double> s;
      if (p.source_kind == SourceKind::complex_gaussian) {
        double a, b;
        rs.next_normal_pair(a, b);
        s = {gauss_scale * a, gauss_scale * b};
      } else {
        int idx = static_cast<int>(rs.next_uniform() * p.psk_order);
        if (idx >= p.psk_order) idx = p.psk_order - 1;
        const double phase = phase_step * idx;
        s = {psk_amplitude * std::cos(phase), psk_amplitude * std::sin(phase)};
      }
      double wa, wb;
      rs.next_normal_pair(wa, wb);
      out[n] = c * s + std::complex<double>(noise_scale * wa, noise_scale * wb);
    }
  }
}

}  // namespace

void SystemParams::validate() const {
  if (samples_per_symbol < 2) {
    throw std::domain_error("samples_per_symbol must be >= 2");
  }
  if (symbols_per_block < 4 || symbols_per_block % 4 != 0) {
    throw std::domain_error("symbols_per_block must be >= 4 and divisible by 4");
  }
  if (!std::isfinite(source_power) || source_power < 0.0) {
    throw std::domain_error("source_power must be finite and nonnegative");
  }
  if (!std::isfinite(noise_power) || noise_power < 0.0) {
    throw std::domain_error("noise_power must be finite and nonnegative");
  }
  check_finite(bt_attenuation, "bt_attenuation");
  if (rtse_magnitude < 0 || 2 * rtse_magnitude >= samples_per_symbol) {
    throw std::domain_error("rtse_magnitude must satisfy 0 <= n_a < N/2");
  }
  if ((rtse_magnitude == 0) != (rtse_sign == RtseSign::zero)) {
    throw std::domain_error(
        "rtse_magnitude is zero exactly when rtse_sign is zero");
  }
  if (source_kind == SourceKind::psk && psk_order < 2) {
    throw std::domain_error("psk_order must be >= 2");
  }
}

ChannelState derive_channel_state(std::complex<double> h,
                                  std::complex<double> f,
                                  std::complex<double> g,
                                  const SystemParams& params) {
  check_finite(h, "h");
  check_finite(f, "f");
  check_finite(g, "g");
  check_finite(params.bt_attenuation, "bt_attenuation");

  ChannelState state;
  state.h = h;
  state.f = f;
  state.g = g;
  state.mu = h + params.bt_attenuation * f * g;
  state.sigma0_sq = std::norm(h) * params.source_power + params.noise_power;
  state.sigma1_sq = std::norm(state.mu) * params.source_power + params.noise_power;
  state.sigma_min_sq = std::min(state.sigma0_sq, state.sigma1_sq);
  state.sigma_max_sq = std::max(state.sigma0_sq, state.sigma1_sq);
  state.xi0 = params.noise_power * (2.0 * state.sigma0_sq - params.noise_power);
  state.xi1 = params.noise_power * (2.0 * state.sigma1_sq - params.noise_power);
  state.xi_min = std::min(state.xi0, state.xi1);
  state.xi_max = std::max(state.xi0, state.xi1);
  state.order_flag = state.sigma0_sq <= state.sigma1_sq;
  return state;
}

std::vector<std::uint8_t> random_bits(int count, std::uint64_t seed) {
  if (count < 0) throw std::domain_error("bit count must be nonnegative");
  std::vector<std::uint8_t> bits(static_cast<std::size_t>(count));
  rng::Stream rs(rng::derive(seed, kBitsDomain));
  for (auto& b : bits) b = static_cast<std::uint8_t>(rs.next_u64() & 1u);
  return bits;
}

void random_channel_coefficients(std::uint64_t seed, std::complex<double>& h,
                                 std::complex<double>& f,
                                 std::complex<double>& g) {
  rng::Stream rs(rng::derive(seed, kChannelDomain));
  const double unit_scale = std::sqrt(0.5);
  double a, b;
  rs.next_normal_pair(a, b);
  h = {unit_scale * a, unit_scale * b};
  rs.next_normal_pair(a, b);
  f = {unit_scale * a, unit_scale * b};
  rs.next_normal_pair(a, b);
  g = {unit_scale * a, unit_scale * b};
}

SymbolStream synthesize_stream(const SystemParams& params,
                               const ChannelState& channel,
                               const std::vector<std::uint8_t>& bits,
                               std::uint64_t seed) {
  params.validate();
  check_bits(bits, params.symbols_per_block + 2);
  SymbolStream stream;
  stream.params = params;
  stream.channel = channel;
  stream.bits = bits;
  stream.seed = seed;
  fill_samples(stream);
  return stream;
}

void resynthesize_stream(SymbolStream& stream,
                         const std::vector<std::uint8_t>& bits,
                         std::uint64_t seed) {
  check_bits(bits, stream.params.symbols_per_block + 2);
  stream.bits = bits;
  stream.seed = seed;
  fill_samples(stream);
}

std::span<const std::complex<double>> window(const SymbolStream& stream,
                                             int k) {
  const SystemParams& p = stream.params;
  if (k < 1 || k > p.symbols_per_block) {
    throw std::out_of_range("window index must be in 1..K");
  }
  std::ptrdiff_t offset =
      static_cast<std::ptrdiff_t>(k) * p.samples_per_symbol;
  if (p.rtse_sign == RtseSign::negative) {
    offset -= p.rtse_magnitude;
  } else if (p.rtse_sign == RtseSign::positive) {
    offset += p.rtse_magnitude;
  }
  return std::span<const std::complex<double>>(stream.samples)
      .subspan(static_cast<std::size_t>(offset),
               static_cast<std::size_t>(p.samples_per_symbol));
}

int adjacent_symbol_index(const SystemParams& params, int k) {
  if (k < 1 || k > params.symbols_per_block) {
    throw std::out_of_range("payload index must be in 1..K");
  }
  return params.rtse_sign == RtseSign::positive ? k + 1 : k - 1;
}

void dump_stream(const SymbolStream& stream, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("dump_stream: cannot open " + path);
  for (const auto& z : stream.samples) {
    const double re = z.real();
    const double im = z.imag();
    out.write(reinterpret_cast<const char*>(&re), sizeof(re));
    out.write(reinterpret_cast<const char*>(&im), sizeof(im));
  }
  if (!out) throw std::runtime_error("dump_stream: write failed for " + path);
}

}  // namespace ambc

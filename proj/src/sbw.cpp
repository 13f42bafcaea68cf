#include "accomp/sbw.hpp"

#include <cmath>

#include "accomp/errors.hpp"
#include "accomp/wiener.hpp"
#include "parallel.hpp"

namespace accomp {

void SbwConfig::validate(double sample_rate) const {
  stft.validate();
  if (num_bands < 1) throw InvalidArgument("SBW: need at least one subband");
  if (!(cutoff > 0.0) || cutoff > sample_rate / 2.0) throw InvalidArgument("SBW: cutoff must be in (0, Nyquist]");
  if (!(p > 0.0)) throw InvalidArgument("SBW: p must be > 0");
  if (!std::isfinite(wiener_exponent) || wiener_exponent < 0.0)
    throw InvalidArgument("SBW: Wiener exponent must be finite and >= 0");
}

std::vector<double> subband_wiener_gains(std::span<const Complex> s0, std::span<const Complex> x,
                                         const ErbPartition& partition, bool complex_cross) {
  if (s0.size() != x.size() || s0.size() != partition.num_bins())
    throw InvalidArgument("subband gains: frame/partition size mismatch");

  const std::size_t z = partition.num_bands();
  std::vector<double> auto_cov(z, 0.0);
  std::vector<double> gains(z, 0.0);
  double total = 0.0;
  for (std::size_t band = 0; band < z; ++band) {
    const BinRange r = partition.bands[band];
    double acc = 0.0;
    for (std::size_t b = r.first; b <= r.last; ++b) acc += std::norm(s0[b]);
    auto_cov[band] = acc / static_cast<double>(r.size());
    total += acc;
  }
  const double mean_power = total / static_cast<double>(partition.num_bins());
  const double guard = 1e-12 * mean_power;

  for (std::size_t band = 0; band < z; ++band) {
    if (!(auto_cov[band] > guard)) continue;
    const BinRange r = partition.bands[band];
    double cross = 0.0;
    if (complex_cross) {
      Complex acc(0.0, 0.0);
      for (std::size_t b = r.first; b <= r.last; ++b) acc += std::conj(s0[b]) * x[b];
      cross = std::abs(acc);
    } else {
      for (std::size_t b = r.first; b <= r.last; ++b) cross += std::abs(std::conj(s0[b]) * x[b]);
    }
    cross /= static_cast<double>(r.size());
    gains[band] = cross / auto_cov[band];
  }
  return gains;
}

std::vector<Complex> matched_spectrum(std::span<const Complex> s0, std::span<const double> gains,
                                      const ErbPartition& partition, double exponent) {
  if (s0.size() != partition.num_bins() || gains.size() != partition.num_bands())
    throw InvalidArgument("matched spectrum: size mismatch");
  std::vector<Complex> y(s0.size());
  for (std::size_t band = 0; band < partition.num_bands(); ++band) {
    const double g = exponent == 1.0 ? gains[band] : std::pow(gains[band], exponent);
    const BinRange r = partition.bands[band];
    for (std::size_t b = r.first; b <= r.last; ++b) y[b] = g * s0[b];
  }
  return y;
}

SpectralFrameSeq sbw_cancel_frames(const AudioBuffer& mixture, const AudioBuffer& reference,
                                   const SbwConfig& cfg) {
  cfg.validate(mixture.sample_rate);
  if (mixture.size() != reference.size()) throw InvalidArgument("SBW: mixture/reference length mismatch");

  const Window window = cfg.stft.make();
  const ErbPartition partition =
      make_partition(cfg.stft.fft_size, mixture.sample_rate, cfg.cutoff, cfg.num_bands);
  SpectralFrameSeq xs = stft_padded(mixture, window, cfg.stft.hop);
  const SpectralFrameSeq ss = stft_padded(reference, window, cfg.stft.hop);

  detail::parallel_for(xs.num_frames(), [&](std::size_t t) {
    const auto gains = subband_wiener_gains(ss.frames[t], xs.frames[t], partition, cfg.complex_cross);
    const auto y = matched_spectrum(ss.frames[t], gains, partition, cfg.wiener_exponent);
    spectral_subtract_inplace(xs.frames[t], y, cfg.p);
  });
  return xs;
}

AudioBuffer sbw_cancel(const AudioBuffer& mixture, const AudioBuffer& reference,
                       const SbwConfig& cfg) {
  return istft_trimmed(sbw_cancel_frames(mixture, reference, cfg), mixture.size());
}

}  // namespace accomp

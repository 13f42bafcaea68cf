#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "accomp/audio.hpp"
#include "accomp/erb.hpp"
#include "accomp/stft.hpp"

namespace accomp {

struct SbwConfig {
  StftConfig stft;
  std::size_t num_bands = 39;
  double cutoff = 16000.0;
  double p = 1.0;
  double wiener_exponent = 1.0;
  /// Use |sum S0* X| instead of sum |S0* X| for the cross-covariance.
  bool complex_cross = false;

  void validate(double sample_rate) const;
};

/// Per-band gains W(z) = P(z) / R(z) with R the band-mean |S0|^2 and P the
/// band-mean |S0* X|. Bands where the reference is (numerically) silent get 0.
std::vector<double> subband_wiener_gains(std::span<const Complex> s0, std::span<const Complex> x,
                                         const ErbPartition& partition,
                                         bool complex_cross = false);

/// Y(w) = W(z)^exponent * S0(w) for every bin w of band z.
std::vector<Complex> matched_spectrum(std::span<const Complex> s0, std::span<const double> gains,
                                      const ErbPartition& partition, double exponent);

/// Error spectra E for every frame (padded framing, see stft_padded).
SpectralFrameSeq sbw_cancel_frames(const AudioBuffer& mixture, const AudioBuffer& reference,
                                   const SbwConfig& cfg);

/// Subband Wiener canceller: per-frame ERB-band gains, spectral subtraction,
/// overlap-add resynthesis.
AudioBuffer sbw_cancel(const AudioBuffer& mixture, const AudioBuffer& reference,
                       const SbwConfig& cfg);

}  // namespace accomp

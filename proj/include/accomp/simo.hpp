#pragma once

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "accomp/audio.hpp"
#include "accomp/sbw.hpp"

namespace accomp {

inline constexpr double kSpeedOfSound = 343.0;

/// Two-element microphone array.
struct ArrayGeometry {
  double spacing = 0.0214;  // m
  double speed_of_sound = kSpeedOfSound;
  double f_max = 8000.0;
  double sample_rate = kDefaultSampleRate;

  /// Throws unless spacing <= c / (2 f_max) and f_max <= fs / 2.
  void validate() const;
  /// Largest physically possible inter-element delay, in samples.
  [[nodiscard]] double max_delay() const noexcept { return spacing * sample_rate / speed_of_sound; }
};

/// Half-wavelength spacing c / (2 f_max).
double half_wavelength_spacing(double f_max, double speed_of_sound = kSpeedOfSound);

/// theta = asin(kappa * f_max / (fs/2)), in degrees; argument clamped to [-1, 1].
double angle_from_delay(double kappa, const ArrayGeometry& geometry);
double delay_from_angle(double theta_deg, const ArrayGeometry& geometry);

struct DelayEstimate {
  double kappa = 0.0;       // samples
  double theta = 0.0;       // degrees
  double confidence = 0.0;  // fraction of candidate bins retained
};

/// Median over bins of -arg(X2/X1) N / (2 pi w). Only bins below the spatial
/// aliasing limit of the geometry and with |X1| >= 1% of the peak are used.
DelayEstimate estimate_delay(std::span<const Complex> x1, std::span<const Complex> x2,
                             const ArrayGeometry& geometry);

/// D(w) = (E1(w) + W_N^{-w kappa} E2(w)) / 2 with W_N = exp(-i 2 pi / N),
/// N = 2 * (bins - 1).
std::vector<Complex> mrc_combine(std::span<const Complex> e1, std::span<const Complex> e2,
                                 double kappa);

struct SimoResult {
  AudioBuffer output;
  std::vector<double> kappa_per_frame;
};

/// Cancels each channel with the subband Wiener canceller and combines the
/// two error spectra by maximal-ratio combining. When `kappa` is empty the
/// delay is tracked per frame from the cancelled spectra.
SimoResult sbw_simo_cancel_detailed(const AudioBuffer& x1, const AudioBuffer& x2,
                                    const AudioBuffer& reference, const SbwConfig& cfg,
                                    const ArrayGeometry& geometry,
                                    std::optional<double> kappa = std::nullopt);

AudioBuffer sbw_simo_cancel(const AudioBuffer& x1, const AudioBuffer& x2,
                            const AudioBuffer& reference, const SbwConfig& cfg,
                            const ArrayGeometry& geometry,
                            std::optional<double> kappa = std::nullopt);

}  // namespace accomp

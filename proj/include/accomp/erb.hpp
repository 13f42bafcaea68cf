#pragma once

#include <cstddef>
#include <vector>

namespace accomp {

/// ERB-rate of a frequency given in kHz: 21.4 * log10(1 + 4.37 f).
double erbs(double f_khz);

/// Contiguous inclusive bin range [first, last] of one auditory band.
struct BinRange {
  std::size_t first = 0;
  std::size_t last = 0;
  [[nodiscard]] std::size_t size() const noexcept { return last - first + 1; }
};

/// Assignment of the N/2+1 FFT bins to Z contiguous ERB-rate bands.
/// Band indices are zero-based in code (band 0 is the lowest).
struct ErbPartition {
  std::size_t fft_size = 0;
  double sample_rate = 0.0;
  double cutoff = 0.0;
  std::vector<std::size_t> band_of_bin;
  std::vector<BinRange> bands;

  [[nodiscard]] std::size_t num_bands() const noexcept { return bands.size(); }
  [[nodiscard]] std::size_t num_bins() const noexcept { return band_of_bin.size(); }
};

/// Slices the ERB-rate axis [0, erbs(cutoff)] uniformly into `num_bands`
/// bands. Bins above the cutoff join the top band; bands left empty are
/// dropped, so the realized count may be lower than requested.
ErbPartition make_partition(std::size_t fft_size, double sample_rate, double cutoff,
                            std::size_t num_bands);

}  // namespace accomp

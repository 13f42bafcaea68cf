#include "accomp/erb.hpp"

#include <algorithm>
#include <cmath>

#include "accomp/errors.hpp"

namespace accomp {

double erbs(double f_khz) {
  if (!(f_khz >= 0.0)) throw InvalidArgument("erbs: frequency must be >= 0");
  return 21.4 * std::log10(1.0 + 4.37 * f_khz);
}

ErbPartition make_partition(std::size_t fft_size, double sample_rate, double cutoff,
                            std::size_t num_bands) {
  if (fft_size < 2 || fft_size % 2 != 0) throw InvalidArgument("partition: fft size must be even");
  if (!(sample_rate > 0.0)) throw InvalidArgument("partition: sample rate must be > 0");
  if (!(cutoff > 0.0) || cutoff > sample_rate / 2.0)
    throw InvalidArgument("partition: cutoff must be in (0, Nyquist]");
  if (num_bands < 1) throw InvalidArgument("partition: need at least one band");

  const std::size_t bins = fft_size / 2 + 1;
  const double top = erbs(cutoff / 1000.0);
  const double z = static_cast<double>(num_bands);

  std::vector<std::size_t> raw(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    const double f = static_cast<double>(b) * sample_rate / static_cast<double>(fft_size);
    if (f > cutoff) {
      raw[b] = num_bands - 1;
      continue;
    }
    const auto idx = static_cast<std::size_t>(std::floor(z * erbs(f / 1000.0) / top));
    raw[b] = std::min(num_bands - 1, idx);
  }

  // Renumber so empty bands vanish; raw is non-decreasing in b.
  ErbPartition part;
  part.fft_size = fft_size;
  part.sample_rate = sample_rate;
  part.cutoff = cutoff;
  part.band_of_bin.resize(bins);
  for (std::size_t b = 0; b < bins; ++b) {
    if (b == 0 || raw[b] != raw[b - 1]) part.bands.push_back({b, b});
    part.bands.back().last = b;
    part.band_of_bin[b] = part.bands.size() - 1;
  }
  return part;
}

}  // namespace accomp

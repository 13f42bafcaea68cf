#include "accomp/audio.hpp"

#include <cmath>
#include <numeric>

namespace accomp {

double energy(std::span<const double> x) {
  return std::inner_product(x.begin(), x.end(), x.begin(), 0.0);
}

double rms(std::span<const double> x) {
  if (x.empty()) return 0.0;
  return std::sqrt(energy(x) / static_cast<double>(x.size()));
}

std::vector<double> convolve_causal(std::span<const double> x, std::span<const double> h) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k) {
    const std::size_t taps = std::min(h.size(), k + 1);
    double acc = 0.0;
    for (std::size_t i = 0; i < taps; ++i) acc += h[i] * x[k - i];
    y[k] = acc;
  }
  return y;
}

}  // namespace accomp

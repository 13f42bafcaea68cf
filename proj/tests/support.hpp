#pragma once

#include <cmath>
#include <complex>
#include <cstdint>
#include <numbers>
#include <random>
#include <span>
#include <vector>

#include "accomp/audio.hpp"

namespace testing {

inline std::vector<double> white_noise(std::size_t n, std::uint64_t seed, double sigma = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sigma);
  std::vector<double> x(n);
  for (double& v : x) v = g(rng);
  return x;
}

inline accomp::AudioBuffer noise_buffer(std::size_t n, std::uint64_t seed, double sigma = 1.0,
                                        double fs = accomp::kDefaultSampleRate) {
  return accomp::AudioBuffer(white_noise(n, seed, sigma), fs);
}

inline std::vector<std::complex<double>> random_spectrum(std::size_t n, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, 1.0);
  std::vector<std::complex<double>> x(n);
  for (auto& v : x) v = {g(rng), g(rng)};
  return x;
}

// Direct FIR filtering, y[k] = sum_j h[j] x[k - j], truncated to x.size().
inline std::vector<double> fir(std::span<const double> x, std::span<const double> h) {
  std::vector<double> y(x.size(), 0.0);
  for (std::size_t k = 0; k < x.size(); ++k)
    for (std::size_t j = 0; j < h.size() && j <= k; ++j) y[k] += h[j] * x[k - j];
  return y;
}

inline double rms_of(std::span<const double> x) {
  double acc = 0.0;
  for (double v : x) acc += v * v;
  return x.empty() ? 0.0 : std::sqrt(acc / static_cast<double>(x.size()));
}

inline double rel_error(std::span<const double> a, std::span<const double> b) {
  double num = 0.0, den = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    num += (a[i] - b[i]) * (a[i] - b[i]);
    den += b[i] * b[i];
  }
  return std::sqrt(num / den);
}

inline double db20(double v) { return 20.0 * std::log10(v); }

}  // namespace testing

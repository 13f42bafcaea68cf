#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace accomp {

inline constexpr double kDefaultSampleRate = 44100.0;

/// Mono sample sequence. Samples are full-scale normalized (|x| <= 1 nominal).
struct AudioBuffer {
  std::vector<double> samples;
  double sample_rate = kDefaultSampleRate;

  AudioBuffer() = default;
  AudioBuffer(std::vector<double> s, double fs) : samples(std::move(s)), sample_rate(fs) {}
  AudioBuffer(std::size_t n, double fs) : samples(n, 0.0), sample_rate(fs) {}

  [[nodiscard]] std::size_t size() const noexcept { return samples.size(); }
  [[nodiscard]] bool empty() const noexcept { return samples.empty(); }
  [[nodiscard]] double duration() const noexcept {
    return sample_rate > 0.0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
  [[nodiscard]] std::span<const double> view() const noexcept { return samples; }
  double& operator[](std::size_t i) { return samples[i]; }
  double operator[](std::size_t i) const { return samples[i]; }
};

/// Root-mean-square value; 0 for an empty span.
double rms(std::span<const double> x);

/// Sum of squares.
double energy(std::span<const double> x);

/// Causal linear convolution truncated to x.size() samples.
std::vector<double> convolve_causal(std::span<const double> x, std::span<const double> h);

}  // namespace accomp

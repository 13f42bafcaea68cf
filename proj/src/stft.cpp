#include "accomp/stft.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "accomp/errors.hpp"

namespace accomp {
namespace {

std::vector<double> kbd(std::size_t n, double alpha) {
  const std::size_t half = n / 2;
  const double beta = std::numbers::pi * alpha;
  // Kaiser window of length half + 1.
  std::vector<double> kaiser(half + 1);
  const double norm = std::cyl_bessel_i(0.0, beta);
  for (std::size_t j = 0; j <= half; ++j) {
    const double r = 2.0 * static_cast<double>(j) / static_cast<double>(half) - 1.0;
    kaiser[j] = std::cyl_bessel_i(0.0, beta * std::sqrt(std::max(0.0, 1.0 - r * r))) / norm;
  }
  double total = 0.0;
  for (double v : kaiser) total += v;

  std::vector<double> w(n);
  double cumulative = 0.0;
  for (std::size_t i = 0; i < half; ++i) {
    cumulative += kaiser[i];
    w[i] = std::sqrt(cumulative / total);
    w[n - 1 - i] = w[i];
  }
  return w;
}

}  // namespace

Window make_window(WindowKind kind, std::size_t length, double shape) {
  if (length < 2 || length % 2 != 0) throw InvalidArgument("window length must be even and >= 2");
  if (!(shape >= 0.0)) throw InvalidArgument("window shape must be >= 0");
  Window w;
  w.kind = kind;
  w.shape = shape;
  switch (kind) {
    case WindowKind::Rect:
      w.coefficients.assign(length, 1.0);
      break;
    case WindowKind::Hann: {
      w.coefficients.resize(length);
      const double denom = static_cast<double>(length - 1);
      for (std::size_t i = 0; i < length / 2; ++i) {
        const double v = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * static_cast<double>(i) / denom);
        w.coefficients[i] = v;
        w.coefficients[length - 1 - i] = v;
      }
      break;
    }
    case WindowKind::Kbd:
      w.coefficients = kbd(length, shape);
      break;
  }
  return w;
}

void StftConfig::validate() const {
  if (fft_size < 2 || fft_size % 2 != 0) throw InvalidArgument("fft size must be even and >= 2");
  if (hop == 0 || hop > fft_size) throw InvalidArgument("hop must be in [1, fft size]");
  if (!(shape >= 0.0)) throw InvalidArgument("window shape must be >= 0");
}

SpectralFrameSeq stft(const AudioBuffer& signal, const Window& window, std::size_t hop) {
  const std::size_t n = window.size();
  if (hop == 0) throw InvalidArgument("stft: hop must be > 0");
  if (hop > n) throw InvalidArgument("stft: hop must not exceed the window length");
  if (signal.size() < n) throw InvalidArgument("stft: signal shorter than the window");

  const std::size_t frames = (signal.size() - n + hop - 1) / hop + 1;
  SpectralFrameSeq seq;
  seq.window = window;
  seq.hop = hop;
  seq.sample_rate = signal.sample_rate;
  seq.frames.assign(frames, std::vector<Complex>(n / 2 + 1));

  const RealFft fft(n);
  std::vector<double> buf(n);
  for (std::size_t t = 0; t < frames; ++t) {
    const std::size_t start = t * hop;
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t k = start + i;
      buf[i] = k < signal.size() ? window.coefficients[i] * signal.samples[k] : 0.0;
    }
    fft.forward(buf, seq.frames[t]);
  }
  return seq;
}

AudioBuffer istft(const SpectralFrameSeq& seq) {
  const std::size_t n = seq.fft_size();
  if (n < 2 || seq.hop == 0) throw InvalidArgument("istft: inconsistent frame metadata");
  if (seq.frames.empty()) return AudioBuffer(std::vector<double>{}, seq.sample_rate);

  const std::size_t length = (seq.num_frames() - 1) * seq.hop + n;
  std::vector<double> out(length, 0.0);
  std::vector<double> envelope(length, 0.0);
  const RealFft fft(n);
  std::vector<double> buf(n);
  const auto& w = seq.window.coefficients;
  for (std::size_t t = 0; t < seq.num_frames(); ++t) {
    if (seq.frames[t].size() != n / 2 + 1) throw InvalidArgument("istft: frame length mismatch");
    fft.inverse(seq.frames[t], buf);
    const std::size_t start = t * seq.hop;
    for (std::size_t i = 0; i < n; ++i) {
      out[start + i] += w[i] * buf[i];
      envelope[start + i] += w[i] * w[i];
    }
  }
  const double peak = *std::max_element(envelope.begin(), envelope.end());
  const double floor = peak * 1e-12;
  for (std::size_t k = 0; k < length; ++k) out[k] = envelope[k] > floor ? out[k] / envelope[k] : 0.0;
  return AudioBuffer(std::move(out), seq.sample_rate);
}

SpectralFrameSeq stft_padded(const AudioBuffer& signal, const Window& window, std::size_t hop) {
  if (hop == 0 || hop > window.size()) throw InvalidArgument("stft: hop must be in [1, N]");
  const std::size_t pad = window.size() - hop;
  AudioBuffer padded(signal.size() + 2 * pad, signal.sample_rate);
  std::copy(signal.samples.begin(), signal.samples.end(), padded.samples.begin() + static_cast<std::ptrdiff_t>(pad));
  if (padded.size() < window.size()) padded.samples.resize(window.size(), 0.0);
  return stft(padded, window, hop);
}

AudioBuffer istft_trimmed(const SpectralFrameSeq& frames, std::size_t length) {
  AudioBuffer full = istft(frames);
  const std::size_t pad = frames.fft_size() - frames.hop;
  AudioBuffer out(length, full.sample_rate);
  for (std::size_t k = 0; k < length && k + pad < full.size(); ++k) out.samples[k] = full.samples[k + pad];
  return out;
}

std::size_t bin_of_frequency(double frequency, std::size_t fft_size, double sample_rate) {
  return static_cast<std::size_t>(std::lround(frequency * static_cast<double>(fft_size) / sample_rate));
}

}  // namespace accomp

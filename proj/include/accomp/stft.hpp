#pragma once

#include <cstddef>
#include <vector>

#include "accomp/audio.hpp"
#include "accomp/fft.hpp"

namespace accomp {

enum class WindowKind { Kbd, Hann, Rect };

/// Analysis/synthesis window. Symmetric; the KBD variant also satisfies the
/// Princen-Bradley condition w[i]^2 + w[i + N/2]^2 = 1.
struct Window {
  std::vector<double> coefficients;
  WindowKind kind = WindowKind::Kbd;
  double shape = 4.0;

  [[nodiscard]] std::size_t size() const noexcept { return coefficients.size(); }
};

/// Builds a window of even length >= 2. For KBD, `shape` is the alpha
/// parameter of the underlying Kaiser window (beta = pi * alpha).
Window make_window(WindowKind kind, std::size_t length, double shape = 4.0);

/// Half-spectrum STFT frames plus the framing metadata needed to invert them.
struct SpectralFrameSeq {
  std::vector<std::vector<Complex>> frames;
  Window window;
  std::size_t hop = 0;
  double sample_rate = kDefaultSampleRate;

  [[nodiscard]] std::size_t fft_size() const noexcept { return window.size(); }
  [[nodiscard]] std::size_t bins() const noexcept { return window.size() / 2 + 1; }
  [[nodiscard]] std::size_t num_frames() const noexcept { return frames.size(); }
};

/// Frame t is the FFT of window * signal[t*hop, t*hop + N). The tail is
/// zero-padded so every input sample lands in at least one frame.
SpectralFrameSeq stft(const AudioBuffer& signal, const Window& window, std::size_t hop);

/// Weighted overlap-add with the analysis window, normalized by the summed
/// squared-window envelope. Output length is (frames - 1) * hop + N.
AudioBuffer istft(const SpectralFrameSeq& frames);

/// Framing used by the cancellers: the signal is padded by N - hop zeros at
/// both ends so that, after istft, every original sample sits where the
/// squared-window envelope is fully overlapped. `istft_trimmed` undoes the pad.
SpectralFrameSeq stft_padded(const AudioBuffer& signal, const Window& window, std::size_t hop);
AudioBuffer istft_trimmed(const SpectralFrameSeq& frames, std::size_t length);

/// FFT bin index nearest to `frequency` for the given transform size.
std::size_t bin_of_frequency(double frequency, std::size_t fft_size, double sample_rate);

}  // namespace accomp

namespace accomp {

/// STFT framing parameters shared by the frequency-domain cancellers.
struct StftConfig {
  std::size_t fft_size = 4096;
  std::size_t hop = 2048;
  WindowKind window = WindowKind::Kbd;
  double shape = 4.0;

  [[nodiscard]] Window make() const { return make_window(window, fft_size, shape); }
  void validate() const;
};

}  // namespace accomp

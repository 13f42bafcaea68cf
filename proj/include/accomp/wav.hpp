#pragma once

#include <filesystem>
#include <vector>

#include "accomp/audio.hpp"

namespace accomp {

enum class SampleFormat { Pcm16, Pcm24, Float32 };

struct WavData {
  std::vector<AudioBuffer> channels;
  SampleFormat format = SampleFormat::Float32;
};

/// Reads a mono or multichannel RIFF/WAVE file (PCM 16/24-bit or IEEE float 32).
WavData read_wav(const std::filesystem::path& path);

/// Writes equal-length, equal-rate channels interleaved.
void write_wav(const std::filesystem::path& path, const std::vector<AudioBuffer>& channels,
               SampleFormat format = SampleFormat::Float32);

/// Convenience: first channel of a file, throwing unless it is mono.
AudioBuffer read_mono(const std::filesystem::path& path);

}  // namespace accomp

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "accomp/audio.hpp"
#include "accomp/wiener.hpp"

namespace accomp {

/// Microphone impulse response: seeded Gaussian noise under an exponential
/// envelope whose energy falls 60 dB over `rt_ms`, first tap 1, unit energy.
FirFilter make_mic_ir(double rt_ms, std::size_t length, std::uint64_t seed,
                      double sample_rate = kDefaultSampleRate);

/// Sound pressure level difference 20 log10(r1 / r2) in dB.
double spl_delta(double r1, double r2);

/// Delays x by `delay` samples (>= 0). Integer delays shift exactly; other
/// values use a 31-tap Blackman-windowed sinc interpolator.
std::vector<double> fractional_delay(std::span<const double> x, double delay);

struct SidoConfig {
  double spacing = 0.0214;   // m
  double solo_angle = 21.3;  // degrees
  double accomp_angle = 90.0;
  double speed_of_sound = 343.0;
  double f_max = 8000.0;
};

struct SceneConfig {
  AudioBuffer solo;                     // d(k)
  AudioBuffer accompaniment_reference;  // s0(k)
  FirFilter mic_ir{{1.0}};              // h(k)
  std::size_t channel_delay = 32;       // kappa
  double level_diff = 6.02;             // accompaniment minus solo, dB RMS, as recorded
  /// Fixed accompaniment gain A; overrides level_diff when set (0 mutes).
  std::optional<double> accompaniment_gain;
  std::optional<SidoConfig> sido;
};

struct Scene {
  AudioBuffer mixture;          // x or x1
  std::optional<AudioBuffer> mixture2;  // x2 for two-microphone scenes
  AudioBuffer reference;        // s0, clean
  AudioBuffer reference_solo;   // h * d, metric ground truth
  AudioBuffer recorded_accompaniment;  // h * s as contained in the mixture
  double gain = 0.0;            // realized A
  double solo_delay = 0.0;      // kappa_d between microphones
};

Scene synth_siso(const SceneConfig& cfg);
Scene synth_sido(const SceneConfig& cfg);

/// Solo delay between the microphones: spacing * sin(angle) * fs / c.
double sido_solo_delay(const SidoConfig& sido, double sample_rate);

/// Lag in [0, max_lag] maximizing sum_k recorded[k] reference[k - lag].
std::size_t calibrate_latency(const AudioBuffer& recorded, const AudioBuffer& reference,
                              std::size_t max_lag);

/// Synthetic test material: a note sequence of decaying harmonic tones over a
/// low noise floor.
AudioBuffer make_test_solo(double seconds, std::uint64_t seed,
                           double sample_rate = kDefaultSampleRate);

/// Broadband, non-stationary accompaniment: AR(1)-colored noise whose
/// coloring and level change every beat.
AudioBuffer make_test_accompaniment(double seconds, std::uint64_t seed,
                                    double sample_rate = kDefaultSampleRate);

/// Plain-text key=value scene parameters.
struct SceneParams {
  double level_diff = 6.02;
  std::size_t channel_delay = 32;
  double rt_ms = 13.7;
  std::size_t ir_length = 606;
  std::uint64_t seed = 1;
  double duration = 20.0;
  bool sido = false;
  SidoConfig geometry;
};

SceneParams parse_scene_params(const std::string& text);
std::string format_scene_params(const SceneParams& params);

/// Scene configuration for the given material; the microphone IR is drawn
/// with seed + 2.
SceneConfig scene_config(const SceneParams& params, AudioBuffer solo, AudioBuffer accompaniment);

/// Synthesizes a scene from the test material (solo seed, accompaniment
/// seed + 1), SIDO when params.sido is set.
Scene synth_scene(const SceneParams& params);

}  // namespace accomp

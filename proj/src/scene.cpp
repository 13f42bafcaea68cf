#include "accomp/scene.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <sstream>

#include "accomp/errors.hpp"
#include "accomp/simo.hpp"

namespace accomp {
namespace {

constexpr int kInterpHalfSpan = 15;  // 31 taps

double db(double ratio) { return 20.0 * std::log10(ratio); }

std::vector<double> shift(std::span<const double> x, long delay) {
  std::vector<double> y(x.size(), 0.0);
  const auto n = static_cast<long>(x.size());
  for (long k = 0; k < n; ++k) {
    const long src = k - delay;
    if (src >= 0 && src < n) y[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(src)];
  }
  return y;
}

double windowed_sinc(double u) {
  const double span = kInterpHalfSpan + 1.0;
  if (std::abs(u) >= span) return 0.0;
  const double sinc = u == 0.0 ? 1.0 : std::sin(std::numbers::pi * u) / (std::numbers::pi * u);
  const double blackman = 0.42 + 0.5 * std::cos(std::numbers::pi * u / span) +
                          0.08 * std::cos(2.0 * std::numbers::pi * u / span);
  return sinc * blackman;
}

}  // namespace

FirFilter make_mic_ir(double rt_ms, std::size_t length, std::uint64_t seed, double sample_rate) {
  if (!(rt_ms > 0.0)) throw InvalidArgument("mic IR: reverberation time must be > 0");
  if (length < 1) throw InvalidArgument("mic IR: length must be >= 1");
  if (!(sample_rate > 0.0)) throw InvalidArgument("mic IR: sample rate must be > 0");

  FirFilter h;
  h.taps.resize(length);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  const double rt_samples = rt_ms * 1e-3 * sample_rate;
  h.taps[0] = 1.0;
  for (std::size_t k = 1; k < length; ++k) {
    // Energy envelope 10^(-6 k / rt): -60 dB after rt samples.
    const double envelope = std::pow(10.0, -3.0 * static_cast<double>(k) / rt_samples);
    h.taps[k] = gauss(rng) * envelope;
  }
  const double norm = std::sqrt(energy(h.taps));
  for (double& v : h.taps) v /= norm;
  return h;
}

double spl_delta(double r1, double r2) {
  if (!(r1 > 0.0) || !(r2 > 0.0)) throw InvalidArgument("distance law: radii must be > 0");
  return db(r1 / r2);
}

std::vector<double> fractional_delay(std::span<const double> x, double delay) {
  if (!std::isfinite(delay)) throw InvalidArgument("fractional delay must be finite");
  const double whole = std::floor(delay);
  const double frac = delay - whole;
  const auto base = static_cast<long>(whole);
  if (frac == 0.0) return shift(x, base);

  double taps[2 * kInterpHalfSpan + 1];
  for (int j = -kInterpHalfSpan; j <= kInterpHalfSpan; ++j)
    taps[j + kInterpHalfSpan] = windowed_sinc(static_cast<double>(j) - frac);

  std::vector<double> y(x.size(), 0.0);
  const auto n = static_cast<long>(x.size());
  for (long k = 0; k < n; ++k) {
    double acc = 0.0;
    for (int j = -kInterpHalfSpan; j <= kInterpHalfSpan; ++j) {
      const long m = k - base - j;
      if (m >= 0 && m < n) acc += x[static_cast<std::size_t>(m)] * taps[j + kInterpHalfSpan];
    }
    y[static_cast<std::size_t>(k)] = acc;
  }
  return y;
}

double sido_solo_delay(const SidoConfig& sido, double sample_rate) {
  return sido.spacing * std::sin(sido.solo_angle * std::numbers::pi / 180.0) * sample_rate /
         sido.speed_of_sound;
}

namespace {

struct Parts {
  std::vector<double> solo;   // h * d
  std::vector<double> accomp; // h * s0(k - kappa), before gain
  double gain = 0.0;
};

Parts render(const SceneConfig& cfg) {
  const auto& d = cfg.solo;
  const auto& s0 = cfg.accompaniment_reference;
  if (d.sample_rate != s0.sample_rate) throw InvalidArgument("scene: solo and accompaniment rates differ");
  if (d.size() != s0.size()) throw InvalidArgument("scene: solo and accompaniment lengths differ");
  if (cfg.mic_ir.taps.empty()) throw InvalidArgument("scene: microphone IR is empty");
  if (d.size() <= cfg.channel_delay + cfg.mic_ir.taps.size())
    throw InvalidArgument("scene: signals too short for the channel delay and IR");

  Parts parts;
  parts.solo = convolve_causal(d.samples, cfg.mic_ir.taps);
  parts.accomp = convolve_causal(shift(s0.samples, static_cast<long>(cfg.channel_delay)), cfg.mic_ir.taps);

  if (cfg.accompaniment_gain) {
    if (!(*cfg.accompaniment_gain >= 0.0)) throw InvalidArgument("scene: accompaniment gain must be >= 0");
    parts.gain = *cfg.accompaniment_gain;
  } else {
    if (!std::isfinite(cfg.level_diff)) throw InvalidArgument("scene: level difference must be finite");
    const double solo_rms = rms(parts.solo);
    if (solo_rms == 0.0) throw InvalidArgument("scene: silent solo, level difference undefined");
    const double accomp_rms = rms(parts.accomp);
    parts.gain = accomp_rms > 0.0 ? std::pow(10.0, cfg.level_diff / 20.0) * solo_rms / accomp_rms : 1.0;
  }
  return parts;
}

}  // namespace

Scene synth_siso(const SceneConfig& cfg) {
  Parts parts = render(cfg);
  const double fs = cfg.solo.sample_rate;
  Scene scene;
  scene.gain = parts.gain;
  scene.recorded_accompaniment = AudioBuffer(std::move(parts.accomp), fs);
  for (double& v : scene.recorded_accompaniment.samples) v *= parts.gain;
  scene.mixture = AudioBuffer(parts.solo.size(), fs);
  for (std::size_t k = 0; k < parts.solo.size(); ++k)
    scene.mixture.samples[k] = parts.solo[k] + scene.recorded_accompaniment.samples[k];
  scene.reference = cfg.accompaniment_reference;
  scene.reference_solo = AudioBuffer(std::move(parts.solo), fs);
  return scene;
}

Scene synth_sido(const SceneConfig& cfg) {
  if (!cfg.sido) throw InvalidArgument("scene: two-microphone geometry missing");
  const SidoConfig& g = *cfg.sido;
  ArrayGeometry geometry{g.spacing, g.speed_of_sound, g.f_max, cfg.solo.sample_rate};
  geometry.validate();

  Scene scene = synth_siso(cfg);
  scene.solo_delay = sido_solo_delay(g, cfg.solo.sample_rate);
  const std::vector<double> delayed = convolve_causal(fractional_delay(cfg.solo.samples, scene.solo_delay),
                                                      cfg.mic_ir.taps);
  AudioBuffer x2(delayed.size(), cfg.solo.sample_rate);
  for (std::size_t k = 0; k < delayed.size(); ++k)
    x2.samples[k] = delayed[k] + scene.recorded_accompaniment.samples[k];
  scene.mixture2 = std::move(x2);
  return scene;
}

std::size_t calibrate_latency(const AudioBuffer& recorded, const AudioBuffer& reference,
                              std::size_t max_lag) {
  const std::size_t n = std::min(recorded.size(), reference.size());
  if (max_lag >= n) throw InvalidArgument("latency: max lag must be shorter than the signals");
  if (energy(recorded.samples) == 0.0 || energy(reference.samples) == 0.0)
    throw NoSignal("latency: all-zero input");

  std::size_t best_lag = 0;
  double best = -std::numeric_limits<double>::infinity();
  for (std::size_t lag = 0; lag <= max_lag; ++lag) {
    double acc = 0.0;
    for (std::size_t k = lag; k < recorded.size(); ++k) {
      if (k - lag >= reference.size()) break;
      acc += recorded.samples[k] * reference.samples[k - lag];
    }
    if (acc > best) {
      best = acc;
      best_lag = lag;
    }
  }
  return best_lag;
}

AudioBuffer make_test_solo(double seconds, std::uint64_t seed, double sample_rate) {
  if (!(seconds > 0.0)) throw InvalidArgument("test solo: duration must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(seconds * sample_rate));
  AudioBuffer out(n, sample_rate);
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> semitone(0, 35);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * std::numbers::pi);
  std::normal_distribution<double> gauss(0.0, 1.0);

  const auto note = static_cast<std::size_t>(0.25 * sample_rate);
  for (std::size_t start = 0; start < n; start += note) {
    const double f0 = 110.0 * std::pow(2.0, semitone(rng) / 12.0);
    double phases[6];
    for (double& p : phases) p = phase(rng);
    for (std::size_t i = 0; i < note && start + i < n; ++i) {
      const double t = static_cast<double>(i) / sample_rate;
      double v = 0.0;
      for (int h = 0; h < 6; ++h) {
        const double f = f0 * (h + 1);
        if (f >= 16000.0) break;
        v += std::pow(0.6, h) * std::sin(2.0 * std::numbers::pi * f * t + phases[h]);
      }
      out.samples[start + i] = std::exp(-6.0 * t) * v;
    }
  }
  for (double& v : out.samples) v += 0.01 * gauss(rng);
  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.0)
    for (double& v : out.samples) v *= 0.5 / peak;
  return out;
}

AudioBuffer make_test_accompaniment(double seconds, std::uint64_t seed, double sample_rate) {
  if (!(seconds > 0.0)) throw InvalidArgument("test accompaniment: duration must be > 0");
  const auto n = static_cast<std::size_t>(std::llround(seconds * sample_rate));
  AudioBuffer out(n, sample_rate);
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::uniform_real_distribution<double> pole(-0.9, 0.9);
  std::uniform_real_distribution<double> level(0.2, 1.0);

  const auto beat = static_cast<std::size_t>(0.125 * sample_rate);
  double state = 0.0;
  for (std::size_t start = 0; start < n; start += beat) {
    const double a = pole(rng);
    const double g = level(rng);
    for (std::size_t i = 0; i < beat && start + i < n; ++i) {
      state = a * state + gauss(rng);
      out.samples[start + i] = g * state;
    }
  }
  double peak = 0.0;
  for (double v : out.samples) peak = std::max(peak, std::abs(v));
  if (peak > 0.0)
    for (double& v : out.samples) v *= 0.5 / peak;
  return out;
}

SceneParams parse_scene_params(const std::string& text) {
  SceneParams p;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    const auto first = line.find_first_not_of(" \t\r");
    if (first == std::string::npos) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw InvalidArgument("scene params line " + std::to_string(lineno) + ": expected key=value");
    auto trim = [](std::string s) {
      const auto b = s.find_first_not_of(" \t\r");
      const auto e = s.find_last_not_of(" \t\r");
      return b == std::string::npos ? std::string{} : s.substr(b, e - b + 1);
    };
    const std::string key = trim(line.substr(0, eq));
    const std::string value = trim(line.substr(eq + 1));
    try {
      if (key == "level_diff") p.level_diff = std::stod(value);
      else if (key == "channel_delay" || key == "kappa") p.channel_delay = std::stoul(value);
      else if (key == "rt_ms") p.rt_ms = std::stod(value);
      else if (key == "ir_length") p.ir_length = std::stoul(value);
      else if (key == "seed") p.seed = std::stoull(value);
      else if (key == "duration") p.duration = std::stod(value);
      else if (key == "sido") p.sido = value == "1" || value == "true" || value == "yes";
      else if (key == "spacing") p.geometry.spacing = std::stod(value);
      else if (key == "solo_angle") p.geometry.solo_angle = std::stod(value);
      else if (key == "accomp_angle") p.geometry.accomp_angle = std::stod(value);
      else if (key == "speed_of_sound") p.geometry.speed_of_sound = std::stod(value);
      else if (key == "f_max") p.geometry.f_max = std::stod(value);
      else throw InvalidArgument("scene params: unknown key '" + key + "'");
    } catch (const std::logic_error& e) {
      if (dynamic_cast<const InvalidArgument*>(&e)) throw;
      throw InvalidArgument("scene params: bad value for '" + key + "': " + value);
    }
  }
  return p;
}

namespace {
// Shortest text that parses back to the same double.
std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}
}  // namespace

std::string format_scene_params(const SceneParams& p) {
  std::ostringstream out;
  out << "level_diff=" << shortest(p.level_diff) << '\n'
      << "channel_delay=" << p.channel_delay << '\n'
      << "rt_ms=" << shortest(p.rt_ms) << '\n'
      << "ir_length=" << p.ir_length << '\n'
      << "seed=" << p.seed << '\n'
      << "duration=" << shortest(p.duration) << '\n'
      << "sido=" << (p.sido ? 1 : 0) << '\n';
  if (p.sido) {
    out << "spacing=" << shortest(p.geometry.spacing) << '\n'
        << "solo_angle=" << shortest(p.geometry.solo_angle) << '\n'
        << "accomp_angle=" << shortest(p.geometry.accomp_angle) << '\n'
        << "speed_of_sound=" << shortest(p.geometry.speed_of_sound) << '\n'
        << "f_max=" << shortest(p.geometry.f_max) << '\n';
  }
  return out.str();
}

SceneConfig scene_config(const SceneParams& p, AudioBuffer solo, AudioBuffer accompaniment) {
  const double fs = solo.sample_rate;
  SceneConfig cfg;
  cfg.solo = std::move(solo);
  cfg.accompaniment_reference = std::move(accompaniment);
  cfg.mic_ir = make_mic_ir(p.rt_ms, p.ir_length, p.seed + 2, fs);
  cfg.channel_delay = p.channel_delay;
  cfg.level_diff = p.level_diff;
  if (p.sido) cfg.sido = p.geometry;
  return cfg;
}

Scene synth_scene(const SceneParams& p) {
  const SceneConfig cfg = scene_config(p, make_test_solo(p.duration, p.seed),
                                       make_test_accompaniment(p.duration, p.seed + 1));
  return p.sido ? synth_sido(cfg) : synth_siso(cfg);
}

}  // namespace accomp

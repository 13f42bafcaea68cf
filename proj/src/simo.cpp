#include "accomp/simo.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "accomp/errors.hpp"

namespace accomp {
namespace {

constexpr double kRetainThreshold = 0.01;
constexpr std::size_t kSmoothingSpan = 5;

double median(std::vector<double> v) {
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double rad2deg(double r) { return r * 180.0 / std::numbers::pi; }
double deg2rad(double d) { return d * std::numbers::pi / 180.0; }

}  // namespace

void ArrayGeometry::validate() const {
  if (!(spacing > 0.0)) throw InvalidArgument("array spacing must be > 0");
  if (!(speed_of_sound > 0.0)) throw InvalidArgument("speed of sound must be > 0");
  if (!(sample_rate > 0.0)) throw InvalidArgument("sample rate must be > 0");
  if (!(f_max > 0.0) || f_max > sample_rate / 2.0) throw InvalidArgument("f_max must be in (0, fs/2]");
  if (spacing > half_wavelength_spacing(f_max, speed_of_sound) + 1e-6)
    throw InvalidArgument("array spacing exceeds half the shortest wavelength");
}

double half_wavelength_spacing(double f_max, double speed_of_sound) {
  if (!(f_max > 0.0)) throw InvalidArgument("f_max must be > 0");
  return speed_of_sound / (2.0 * f_max);
}

double angle_from_delay(double kappa, const ArrayGeometry& geometry) {
  const double arg = std::clamp(kappa * geometry.f_max / (geometry.sample_rate / 2.0), -1.0, 1.0);
  return rad2deg(std::asin(arg));
}

double delay_from_angle(double theta_deg, const ArrayGeometry& geometry) {
  return std::sin(deg2rad(theta_deg)) * (geometry.sample_rate / 2.0) / geometry.f_max;
}

DelayEstimate estimate_delay(std::span<const Complex> x1, std::span<const Complex> x2,
                             const ArrayGeometry& geometry) {
  if (x1.size() != x2.size()) throw InvalidArgument("delay estimate: frame length mismatch");
  if (x1.size() < 2) throw InvalidArgument("delay estimate: frame too short");
  geometry.validate();

  const std::size_t bins = x1.size();
  const double n = 2.0 * static_cast<double>(bins - 1);
  // Above this bin the phase of the largest admissible delay wraps.
  const double bound = geometry.max_delay() + 0.5;
  const auto last = std::min(bins - 1, static_cast<std::size_t>(std::floor(n / (2.0 * bound))));

  double peak = 0.0;
  for (std::size_t w = 1; w <= last; ++w) peak = std::max(peak, std::abs(x1[w]));
  std::vector<double> obs;
  obs.reserve(last);
  if (peak > 0.0) {
    for (std::size_t w = 1; w <= last; ++w) {
      if (std::abs(x1[w]) < kRetainThreshold * peak || x2[w] == Complex(0.0, 0.0)) continue;
      const double phase = std::arg(x2[w] * std::conj(x1[w]));
      obs.push_back(-phase * n / (2.0 * std::numbers::pi * static_cast<double>(w)));
    }
  }
  if (obs.empty()) throw NoSignal("delay estimate: no usable frequency bins");

  DelayEstimate est;
  est.confidence = static_cast<double>(obs.size()) / static_cast<double>(last);
  est.kappa = std::clamp(median(std::move(obs)), -bound, bound);
  est.theta = angle_from_delay(est.kappa, geometry);
  return est;
}

std::vector<Complex> mrc_combine(std::span<const Complex> e1, std::span<const Complex> e2,
                                 double kappa) {
  if (e1.size() != e2.size()) throw InvalidArgument("MRC: frame length mismatch");
  if (e1.empty()) return {};
  const double n = 2.0 * static_cast<double>(e1.size() - 1);
  std::vector<Complex> d(e1.size());
  for (std::size_t w = 0; w < e1.size(); ++w) {
    const Complex rot = std::polar(1.0, 2.0 * std::numbers::pi * static_cast<double>(w) * kappa / n);
    d[w] = 0.5 * (e1[w] + rot * e2[w]);
  }
  return d;
}

SimoResult sbw_simo_cancel_detailed(const AudioBuffer& x1, const AudioBuffer& x2,
                                    const AudioBuffer& reference, const SbwConfig& cfg,
                                    const ArrayGeometry& geometry, std::optional<double> kappa) {
  if (x1.size() != x2.size() || x1.size() != reference.size())
    throw InvalidArgument("SIMO: channel/reference length mismatch");
  geometry.validate();

  const SpectralFrameSeq e1 = sbw_cancel_frames(x1, reference, cfg);
  const SpectralFrameSeq e2 = sbw_cancel_frames(x2, reference, cfg);
  const std::size_t frames = e1.num_frames();

  std::vector<double> track(frames, kappa.value_or(0.0));
  if (!kappa) {
    std::vector<double> frame_energy(frames, 0.0);
    for (std::size_t t = 0; t < frames; ++t)
      for (const auto& v : e1.frames[t]) frame_energy[t] += std::norm(v);
    const double loudest = frames ? *std::max_element(frame_energy.begin(), frame_energy.end()) : 0.0;

    std::vector<std::optional<double>> raw(frames);
    for (std::size_t t = 0; t < frames; ++t) {
      if (!(frame_energy[t] > 1e-6 * loudest)) continue;
      try {
        raw[t] = estimate_delay(e1.frames[t], e2.frames[t], geometry).kappa;
      } catch (const NoSignal&) {
      }
    }
    // Running median over 5 frames; frames without estimates inherit the last value.
    double last = 0.0;
    const std::size_t half = kSmoothingSpan / 2;
    for (std::size_t t = 0; t < frames; ++t) {
      std::vector<double> local;
      for (std::size_t u = t >= half ? t - half : 0; u <= std::min(frames - 1, t + half); ++u)
        if (raw[u]) local.push_back(*raw[u]);
      if (!local.empty()) last = median(std::move(local));
      track[t] = last;
    }
  }

  SpectralFrameSeq combined = e1;
  for (std::size_t t = 0; t < frames; ++t) combined.frames[t] = mrc_combine(e1.frames[t], e2.frames[t], track[t]);
  return {istft_trimmed(combined, x1.size()), std::move(track)};
}

AudioBuffer sbw_simo_cancel(const AudioBuffer& x1, const AudioBuffer& x2,
                            const AudioBuffer& reference, const SbwConfig& cfg,
                            const ArrayGeometry& geometry, std::optional<double> kappa) {
  return sbw_simo_cancel_detailed(x1, x2, reference, cfg, geometry, kappa).output;
}

}  // namespace accomp

#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "accomp/audio.hpp"

namespace accomp {

/// Sample-by-sample (N)LMS transversal filter. The regressor holds the last
/// M reference samples, newest first.
class LmsFilter {
 public:
  LmsFilter(std::size_t taps, double mu, bool normalized);

  /// Pushes n0_k into the delay line and returns e_k = x_k - w^T n0,
  /// then adapts w with the same regressor and error.
  double step(double x_k, double n0_k);

  /// Filter output for the current regressor without adapting.
  [[nodiscard]] double predict() const;
  /// Shifts n0_k into the delay line only.
  void push(double n0_k);
  /// w <- w + mu * u * err (or u / ||u||^2 when normalized); u newest first.
  void adapt(std::span<const double> u, double err);

  [[nodiscard]] std::span<const double> weights() const noexcept { return weights_; }
  [[nodiscard]] std::span<const double> regressor() const noexcept;
  [[nodiscard]] std::size_t taps() const noexcept { return weights_.size(); }
  [[nodiscard]] double mu() const noexcept { return mu_; }
  [[nodiscard]] bool normalized() const noexcept { return normalized_; }
  [[nodiscard]] std::size_t samples_seen() const noexcept { return k_; }

 private:
  std::vector<double> weights_;
  std::vector<double> ring_;  // mirrored: regressor is ring_[pos_, pos_ + M)
  std::size_t pos_ = 0;
  double mu_;
  bool normalized_;
  std::size_t k_ = 0;
};

/// Linear-prediction inverse filter v = [1, -a_1, ..., -a_P].
struct Whitener {
  std::vector<double> coeffs;  // a_1..a_P

  [[nodiscard]] std::size_t order() const noexcept { return coeffs.size(); }
  [[nodiscard]] std::vector<double> inverse_filter() const;
  /// v^T [u(k), u(k-1), ..., u(k-P)] for `newest_first` holding at least P+1 samples.
  [[nodiscard]] double apply(std::span<const double> newest_first) const;
  /// Whole-signal inverse filtering with zero initial conditions.
  [[nodiscard]] std::vector<double> filter(std::span<const double> x) const;
};

/// Order-P autocorrelation-method predictor via Levinson-Durbin on the biased
/// sample autocorrelation. An all-zero frame yields a = 0.
Whitener fit_whitener(std::span<const double> frame, std::size_t order);

struct AncConfig {
  std::size_t taps = 1023;
  double mu = 0.10;
  bool normalized = true;
  bool prewhiten = false;
  std::size_t order = 15;
  std::size_t refresh_interval = 16384;

  void validate() const;
};

/// Runs the adaptive canceller over the whole signal and returns e(k).
/// With prewhitening the inverse filter shapes only the weight update; it is
/// refit every refresh_interval samples on the trailing reference window.
AudioBuffer anc_cancel(const AudioBuffer& mixture, const AudioBuffer& reference,
                       const AncConfig& cfg);

}  // namespace accomp

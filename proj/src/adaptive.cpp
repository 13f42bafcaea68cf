#include "accomp/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "accomp/errors.hpp"

namespace accomp {
namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  return std::inner_product(a.begin(), a.end(), b.begin(), 0.0);
}

// Fixed-length history, newest first, stored twice so the view is contiguous.
class History {
 public:
  explicit History(std::size_t length) : length_(length), ring_(2 * length, 0.0) {}

  void push(double v) {
    pos_ = pos_ == 0 ? length_ - 1 : pos_ - 1;
    ring_[pos_] = v;
    ring_[pos_ + length_] = v;
  }
  [[nodiscard]] std::span<const double> view() const { return {ring_.data() + pos_, length_}; }
  void assign(std::span<const double> newest_first) {
    pos_ = 0;
    std::copy(newest_first.begin(), newest_first.end(), ring_.begin());
    std::copy(newest_first.begin(), newest_first.end(), ring_.begin() + static_cast<std::ptrdiff_t>(length_));
  }

 private:
  std::size_t length_;
  std::vector<double> ring_;
  std::size_t pos_ = 0;
};

}  // namespace

LmsFilter::LmsFilter(std::size_t taps, double mu, bool normalized)
    : weights_(taps, 0.0), ring_(2 * taps, 0.0), mu_(mu), normalized_(normalized) {
  if (taps == 0) throw InvalidArgument("LMS filter needs at least one tap");
  if (!std::isfinite(mu) || mu < 0.0) throw InvalidArgument("LMS step size must be finite and >= 0");
}

std::span<const double> LmsFilter::regressor() const noexcept {
  return {ring_.data() + pos_, weights_.size()};
}

void LmsFilter::push(double n0_k) {
  const std::size_t m = weights_.size();
  pos_ = pos_ == 0 ? m - 1 : pos_ - 1;
  ring_[pos_] = n0_k;
  ring_[pos_ + m] = n0_k;
  ++k_;
}

double LmsFilter::predict() const { return dot(weights_, regressor()); }

void LmsFilter::adapt(std::span<const double> u, double err) {
  if (mu_ == 0.0) return;
  double scale = mu_ * err;
  if (normalized_) {
    const double norm = dot(u, u);
    if (norm == 0.0) return;
    scale /= norm;
  }
  for (std::size_t i = 0; i < weights_.size(); ++i) weights_[i] += scale * u[i];
}

double LmsFilter::step(double x_k, double n0_k) {
  if (!std::isfinite(x_k) || !std::isfinite(n0_k)) throw InvalidArgument("LMS input sample is not finite");
  push(n0_k);
  const double e = x_k - predict();
  adapt(regressor(), e);
  return e;
}

std::vector<double> Whitener::inverse_filter() const {
  std::vector<double> v(coeffs.size() + 1);
  v[0] = 1.0;
  for (std::size_t p = 0; p < coeffs.size(); ++p) v[p + 1] = -coeffs[p];
  return v;
}

double Whitener::apply(std::span<const double> newest_first) const {
  double acc = newest_first[0];
  for (std::size_t p = 0; p < coeffs.size(); ++p) acc -= coeffs[p] * newest_first[p + 1];
  return acc;
}

std::vector<double> Whitener::filter(std::span<const double> x) const {
  std::vector<double> y(x.size());
  for (std::size_t k = 0; k < x.size(); ++k) {
    double acc = x[k];
    for (std::size_t p = 0; p < coeffs.size() && p < k; ++p) acc -= coeffs[p] * x[k - p - 1];
    y[k] = acc;
  }
  return y;
}

Whitener fit_whitener(std::span<const double> frame, std::size_t order) {
  if (order == 0) return {};
  if (frame.size() <= 10 * order) throw InvalidArgument("whitener frame must exceed 10 * order samples");

  std::vector<double> r(order + 1, 0.0);
  for (std::size_t lag = 0; lag <= order; ++lag)
    r[lag] = dot(frame.subspan(lag), frame.subspan(0, frame.size() - lag)) /
             static_cast<double>(frame.size());

  Whitener w;
  w.coeffs.assign(order, 0.0);
  if (r[0] <= 0.0) return w;

  // Levinson-Durbin; a holds the predictor coefficients of the current order.
  std::vector<double> a(order, 0.0);
  std::vector<double> prev(order, 0.0);
  double err = r[0];
  for (std::size_t m = 0; m < order; ++m) {
    double acc = r[m + 1];
    for (std::size_t j = 0; j < m; ++j) acc -= a[j] * r[m - j];
    const double k = acc / err;
    prev = a;
    a[m] = k;
    for (std::size_t j = 0; j < m; ++j) a[j] = prev[j] - k * prev[m - 1 - j];
    err *= (1.0 - k * k);
    if (err <= 0.0) break;  // perfectly predictable frame
  }
  w.coeffs = std::move(a);
  return w;
}

void AncConfig::validate() const {
  if (taps == 0) throw InvalidArgument("ANC: filter length must be >= 1");
  if (!std::isfinite(mu) || mu < 0.0) throw InvalidArgument("ANC: step size must be finite and >= 0");
  if (prewhiten) {
    if (order == 0) throw InvalidArgument("ANC: whitener order must be >= 1");
    if (refresh_interval <= 10 * order)
      throw InvalidArgument("ANC: whitener refresh interval must exceed 10 * order");
  }
}

AudioBuffer anc_cancel(const AudioBuffer& mixture, const AudioBuffer& reference,
                       const AncConfig& cfg) {
  cfg.validate();
  if (mixture.size() != reference.size()) throw InvalidArgument("ANC: mixture/reference length mismatch");

  const std::size_t n = mixture.size();
  AudioBuffer out(n, mixture.sample_rate);
  LmsFilter lms(cfg.taps, cfg.mu, cfg.normalized);

  if (!cfg.prewhiten) {
    for (std::size_t k = 0; k < n; ++k) out.samples[k] = lms.step(mixture.samples[k], reference.samples[k]);
    return out;
  }

  // Whitened regressor and error histories feed only the weight update.
  const std::size_t p = cfg.order;
  Whitener whitener;
  whitener.coeffs.assign(p, 0.0);
  History raw_ref(cfg.taps + p);
  History white_ref(cfg.taps);
  History err_hist(p + 1);
  const auto& ref = reference.samples;

  for (std::size_t k = 0; k < n; ++k) {
    if (k > 0 && k % cfg.refresh_interval == 0) {
      const std::size_t len = std::min(k, cfg.refresh_interval);
      whitener = fit_whitener(std::span<const double>(ref).subspan(k - len, len), p);
      // Re-filter the regressor history with the new inverse filter.
      const auto hist = raw_ref.view();
      std::vector<double> refreshed(cfg.taps);
      for (std::size_t i = 0; i < cfg.taps; ++i) refreshed[i] = whitener.apply(hist.subspan(i, p + 1));
      white_ref.assign(refreshed);
    }
    if (!std::isfinite(mixture.samples[k]) || !std::isfinite(ref[k]))
      throw InvalidArgument("ANC: input sample is not finite");

    raw_ref.push(ref[k]);
    lms.push(ref[k]);
    white_ref.push(whitener.apply(raw_ref.view().subspan(0, p + 1)));

    const double e = mixture.samples[k] - lms.predict();
    out.samples[k] = e;
    err_hist.push(e);
    lms.adapt(white_ref.view(), whitener.apply(err_hist.view()));
  }
  return out;
}

}  // namespace accomp

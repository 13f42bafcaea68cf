#include "accomp/wiener.hpp"

#include <algorithm>
#include <cmath>

#include "accomp/errors.hpp"
#include "parallel.hpp"

namespace accomp {

void BlockWienerConfig::validate() const {
  if (taps == 0) throw InvalidArgument("MAW: filter length must be >= 1");
  if (taps >= block) throw InvalidArgument("MAW: filter length must be smaller than the block size");
  if (hop == 0 || hop > block) throw InvalidArgument("MAW: hop must be in [1, block size]");
  if (!(regularization >= 0.0)) throw InvalidArgument("MAW: regularization must be >= 0");
}

Eigen::MatrixXd toeplitz_matrix(std::span<const double> reference_window, std::size_t taps,
                                std::size_t block) {
  if (reference_window.size() != taps + block - 1)
    throw InvalidArgument("toeplitz: reference window must hold M + N - 1 samples");
  Eigen::MatrixXd m(static_cast<Eigen::Index>(taps), static_cast<Eigen::Index>(block));
  const std::size_t a = taps - 1;
  for (std::size_t i = 0; i < taps; ++i)
    for (std::size_t t = 0; t < block; ++t)
      m(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(t)) = reference_window[a + t - i];
  return m;
}

NormalEquations sample_covariances(std::span<const double> reference_window,
                                   std::span<const double> mixture_block, std::size_t taps) {
  const std::size_t n = mixture_block.size();
  if (taps == 0 || n == 0) throw InvalidArgument("covariances: empty problem");
  if (reference_window.size() != taps + n - 1)
    throw InvalidArgument("covariances: reference window must hold M + N - 1 samples");

  const std::size_t a = taps - 1;
  const auto& r = reference_window;
  const auto m = static_cast<Eigen::Index>(taps);
  NormalEquations eq{Eigen::MatrixXd(m, m), Eigen::VectorXd(m)};

  // First row by direct sums, the rest by sliding one sample at each end.
  for (std::size_t j = 0; j < taps; ++j) {
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) acc += r[a + t] * r[a + t - j];
    eq.autocov(0, static_cast<Eigen::Index>(j)) = acc;
  }
  for (std::size_t i = 0; i + 1 < taps; ++i) {
    for (std::size_t j = i; j + 1 < taps; ++j) {
      const double head = r[a - 1 - i] * r[a - 1 - j];
      const double tail = r[a + n - 1 - i] * r[a + n - 1 - j];
      eq.autocov(static_cast<Eigen::Index>(i + 1), static_cast<Eigen::Index>(j + 1)) =
          eq.autocov(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) + head - tail;
    }
  }
  for (Eigen::Index i = 0; i < m; ++i)
    for (Eigen::Index j = 0; j < i; ++j) eq.autocov(i, j) = eq.autocov(j, i);

  for (std::size_t i = 0; i < taps; ++i) {
    double acc = 0.0;
    for (std::size_t t = 0; t < n; ++t) acc += r[a + t - i] * mixture_block[t];
    eq.crosscov(static_cast<Eigen::Index>(i)) = acc;
  }
  const double inv_n = 1.0 / static_cast<double>(n);
  eq.autocov *= inv_n;
  eq.crosscov *= inv_n;
  return eq;
}

FirFilter solve_wiener_hopf(const NormalEquations& eq, double regularization) {
  if (!(regularization >= 0.0)) throw InvalidArgument("regularization must be >= 0");
  const Eigen::Index m = eq.autocov.rows();
  const double trace = eq.autocov.trace();
  if (trace <= 0.0) {
    if (regularization > 0.0) return FirFilter{std::vector<double>(static_cast<std::size_t>(m), 0.0)};
    throw SolverFailure("Wiener-Hopf system is singular (silent reference); use regularization > 0");
  }
  Eigen::MatrixXd lhs = eq.autocov;
  lhs.diagonal().array() += regularization * trace / static_cast<double>(m);
  const Eigen::LLT<Eigen::MatrixXd> llt(lhs);
  if (llt.info() != Eigen::Success)
    throw SolverFailure("Wiener-Hopf system is not positive definite; use regularization > 0");
  const Eigen::VectorXd w = llt.solve(eq.crosscov);
  if (!w.allFinite()) throw SolverFailure("Wiener-Hopf solution is not finite; use regularization > 0");
  return FirFilter{std::vector<double>(w.data(), w.data() + w.size())};
}

FirFilter block_wiener(std::span<const double> reference_window,
                       std::span<const double> mixture_block, std::size_t taps,
                       double regularization) {
  return solve_wiener_hopf(sample_covariances(reference_window, mixture_block, taps), regularization);
}

namespace {

// s0[k] with zeros outside [0, size).
double at(const std::vector<double>& s, std::ptrdiff_t k) {
  return k >= 0 && k < static_cast<std::ptrdiff_t>(s.size()) ? s[static_cast<std::size_t>(k)] : 0.0;
}

double fir_at(const std::vector<double>& w, const std::vector<double>& s, std::ptrdiff_t k) {
  double acc = 0.0;
  const auto m = static_cast<std::ptrdiff_t>(w.size());
  if (k - m + 1 >= 0) {
    const double* p = s.data() + k;
    for (std::ptrdiff_t i = 0; i < m; ++i) acc += w[static_cast<std::size_t>(i)] * p[-i];
  } else {
    for (std::ptrdiff_t i = 0; i < m && i <= k; ++i) acc += w[static_cast<std::size_t>(i)] * s[static_cast<std::size_t>(k - i)];
  }
  return acc;
}

}  // namespace

AudioBuffer matched_accompaniment(const AudioBuffer& mixture, const AudioBuffer& reference,
                                  const BlockWienerConfig& cfg) {
  cfg.validate();
  if (mixture.size() != reference.size()) throw InvalidArgument("MAW: mixture/reference length mismatch");

  const std::size_t n = mixture.size();
  const std::size_t m = cfg.taps;
  const std::size_t nb = cfg.block;
  const std::size_t blocks = (n + cfg.hop - 1) / cfg.hop;
  const auto& x = mixture.samples;
  const auto& s0 = reference.samples;

  auto filter_for = [&](std::size_t b) {
    const auto end = static_cast<std::ptrdiff_t>(std::min(n, (b + 1) * cfg.hop));
    const std::ptrdiff_t first = end - static_cast<std::ptrdiff_t>(nb);
    std::vector<double> window(m + nb - 1);
    std::vector<double> block(nb);
    for (std::size_t i = 0; i < window.size(); ++i)
      window[i] = at(s0, first - static_cast<std::ptrdiff_t>(m) + 1 + static_cast<std::ptrdiff_t>(i));
    for (std::size_t t = 0; t < nb; ++t) block[t] = at(x, first + static_cast<std::ptrdiff_t>(t));
    return block_wiener(window, block, m, cfg.regularization).taps;
  };

  AudioBuffer y(n, mixture.sample_rate);
  std::vector<double> previous;
  // Filters of a chunk of blocks are solved concurrently, then applied in order.
  const std::size_t chunk = std::max<std::size_t>(1, 4 * detail::worker_count());
  std::vector<std::vector<double>> filters;
  for (std::size_t c0 = 0; c0 < blocks; c0 += chunk) {
    const std::size_t count = std::min(chunk, blocks - c0);
    filters.assign(count, {});
    detail::parallel_for(count, [&](std::size_t i) { filters[i] = filter_for(c0 + i); });

    for (std::size_t i = 0; i < count; ++i) {
      const std::size_t b = c0 + i;
      const auto& w = filters[i];
      if (previous.empty()) previous = w;
      const std::size_t start = b * cfg.hop;
      const std::size_t stop = std::min(n, start + cfg.hop);
      for (std::size_t k = start; k < stop; ++k) {
        const double cur = fir_at(w, s0, static_cast<std::ptrdiff_t>(k));
        if (cfg.interpolate) {
          const double alpha = static_cast<double>(k - start + 1) / static_cast<double>(cfg.hop);
          const double prev = fir_at(previous, s0, static_cast<std::ptrdiff_t>(k));
          y.samples[k] = (1.0 - alpha) * prev + alpha * cur;
        } else {
          y.samples[k] = cur;
        }
      }
      previous = w;
    }
  }
  return y;
}

AudioBuffer maw_cancel(const AudioBuffer& mixture, const AudioBuffer& reference,
                       const BlockWienerConfig& cfg) {
  AudioBuffer y = matched_accompaniment(mixture, reference, cfg);
  for (std::size_t k = 0; k < y.size(); ++k) y.samples[k] = mixture.samples[k] - y.samples[k];
  return y;
}

void spectral_subtract_inplace(std::span<Complex> x, std::span<const Complex> y, double p) {
  if (!(p > 0.0)) throw InvalidArgument("spectral subtraction: p must be > 0");
  if (x.size() != y.size()) throw InvalidArgument("spectral subtraction: spectrum length mismatch");
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double ay = std::abs(y[i]);
    if (ay == 0.0) continue;
    const double ax = std::abs(x[i]);
    if (!(ax > ay)) {
      x[i] = Complex(0.0, 0.0);
      continue;
    }
    double mag;
    if (p == 1.0)
      mag = ax - ay;
    else if (p == 2.0)
      mag = std::sqrt((ax - ay) * (ax + ay));
    else
      mag = std::pow(std::pow(ax, p) - std::pow(ay, p), 1.0 / p);
    x[i] *= std::min(1.0, mag / ax);
  }
}

std::vector<Complex> spectral_subtract(std::span<const Complex> x, std::span<const Complex> y,
                                       double p) {
  std::vector<Complex> e(x.begin(), x.end());
  spectral_subtract_inplace(e, y, p);
  return e;
}

AudioBuffer spectral_subtract_signal(const AudioBuffer& mixture, const AudioBuffer& matched,
                                     const StftConfig& stft_cfg, double p) {
  stft_cfg.validate();
  if (mixture.size() != matched.size()) throw InvalidArgument("spectral subtraction: length mismatch");
  if (!(p > 0.0)) throw InvalidArgument("spectral subtraction: p must be > 0");
  const Window window = stft_cfg.make();
  SpectralFrameSeq xs = stft_padded(mixture, window, stft_cfg.hop);
  const SpectralFrameSeq ys = stft_padded(matched, window, stft_cfg.hop);
  for (std::size_t t = 0; t < xs.num_frames(); ++t) spectral_subtract_inplace(xs.frames[t], ys.frames[t], p);
  return istft_trimmed(xs, mixture.size());
}

AudioBuffer maw_ss_cancel(const AudioBuffer& mixture, const AudioBuffer& reference,
                          const BlockWienerConfig& cfg, const StftConfig& stft_cfg, double p) {
  stft_cfg.validate();
  if (!(p > 0.0)) throw InvalidArgument("spectral subtraction: p must be > 0");
  const AudioBuffer y = matched_accompaniment(mixture, reference, cfg);
  return spectral_subtract_signal(mixture, y, stft_cfg, p);
}

}  // namespace accomp

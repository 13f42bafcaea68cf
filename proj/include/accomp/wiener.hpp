#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "accomp/audio.hpp"
#include "accomp/stft.hpp"

namespace accomp {

struct FirFilter {
  std::vector<double> taps;
  [[nodiscard]] std::size_t order() const noexcept { return taps.empty() ? 0 : taps.size() - 1; }
};

struct BlockWienerConfig {
  std::size_t taps = 1023;        // M
  std::size_t block = 16384;      // N
  std::size_t hop = 64;           // L
  double regularization = 1e-8;   // relative to the mean diagonal of R
  bool interpolate = true;

  void validate() const;
};

/// M x N data matrix whose column t is [n0(k+t), n0(k+t-1), ..., n0(k+t-M+1)].
/// `reference_window` holds n0(k-M+1) .. n0(k+N-1).
Eigen::MatrixXd toeplitz_matrix(std::span<const double> reference_window, std::size_t taps,
                                std::size_t block);

struct NormalEquations {
  Eigen::MatrixXd autocov;   // (1/N) N0 N0^T
  Eigen::VectorXd crosscov;  // (1/N) N0 x^T
};

/// Sample covariances without materializing the data matrix.
NormalEquations sample_covariances(std::span<const double> reference_window,
                                   std::span<const double> mixture_block, std::size_t taps);

/// Solves (R + eps * tr(R)/M * I) w = p by Cholesky. A silent reference
/// (tr R = 0) with eps > 0 gives w = 0; a singular R with eps = 0 throws.
FirFilter solve_wiener_hopf(const NormalEquations& eq, double regularization);

/// Block Wiener-Hopf estimate of the filter matching the reference to the mixture.
FirFilter block_wiener(std::span<const double> reference_window,
                       std::span<const double> mixture_block, std::size_t taps,
                       double regularization);

/// Matched accompaniment y = w * s0, with w recomputed every hop samples over
/// the trailing N-sample block (and M-1 samples of leading context).
AudioBuffer matched_accompaniment(const AudioBuffer& mixture, const AudioBuffer& reference,
                                  const BlockWienerConfig& cfg);

/// Time-domain subtraction e = x - y.
AudioBuffer maw_cancel(const AudioBuffer& mixture, const AudioBuffer& reference,
                       const BlockWienerConfig& cfg);

/// |E| = (|X|^p - |Y|^p)^(1/p) where |X| > |Y|, else 0; arg E = arg X.
std::vector<Complex> spectral_subtract(std::span<const Complex> x, std::span<const Complex> y,
                                       double p);
void spectral_subtract_inplace(std::span<Complex> x, std::span<const Complex> y, double p);

/// Matched accompaniment as in maw_cancel, subtracted in the STFT domain.
AudioBuffer maw_ss_cancel(const AudioBuffer& mixture, const AudioBuffer& reference,
                          const BlockWienerConfig& cfg, const StftConfig& stft_cfg, double p);

/// Spectral subtraction of an already matched accompaniment.
AudioBuffer spectral_subtract_signal(const AudioBuffer& mixture, const AudioBuffer& matched,
                                     const StftConfig& stft_cfg, double p);

}  // namespace accomp

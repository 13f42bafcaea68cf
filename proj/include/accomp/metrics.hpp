#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "accomp/audio.hpp"
#include "accomp/erb.hpp"
#include "accomp/stft.hpp"

namespace accomp {

inline constexpr std::size_t kRmsdBlock = 1024;
inline constexpr double kRmsdFloorDb = -120.0;
inline constexpr double kSnrfClampDb = 100.0;

/// Mean of the per-block RMS deviation over non-overlapping blocks, in dB
/// re full scale, floored at -120 dB. A trailing partial block is ignored
/// unless the signal is shorter than one block.
double rmsd(const AudioBuffer& estimate, const AudioBuffer& ref_solo,
            std::size_t block = kRmsdBlock);

struct SnrfResult {
  double snrf_db = 0.0;
  std::size_t cells = 0;  // (segment, band) cells that entered the mean
  std::vector<double> per_segment;  // mean over bands per segment (NaN if none)
};

/// Frequency-weighted segmental SNR over ERB bands. Cells whose signal power
/// is zero are skipped; each cell ratio is clamped to +-100 dB.
SnrfResult snrf_detailed(const AudioBuffer& estimate, const AudioBuffer& ref_solo,
                         const ErbPartition& partition, const StftConfig& stft_cfg);
double snrf(const AudioBuffer& estimate, const AudioBuffer& ref_solo,
            const ErbPartition& partition, const StftConfig& stft_cfg);

/// Execution time divided by signal duration.
double rtf(double elapsed_seconds, double duration_seconds);

struct MetricsParams {
  std::size_t block_size = kRmsdBlock;
  std::size_t segments = 0;
  std::size_t bands = 0;
};

struct MetricsReport {
  double rmsd_db = 0.0;
  double snrf_db = 0.0;
  double rtf = 0.0;
  std::vector<double> per_segment;
  MetricsParams params;
};

struct EvaluateOptions {
  StftConfig stft;
  std::size_t num_bands = 39;
  double cutoff = 16000.0;
  std::size_t block = kRmsdBlock;
};

MetricsReport evaluate(const AudioBuffer& estimate, const AudioBuffer& ref_solo,
                       const EvaluateOptions& opts = {}, double elapsed_seconds = 0.0);

std::string report_csv_header();
std::string report_csv_row(const MetricsReport& report);
std::string report_summary(const MetricsReport& report);

}  // namespace accomp

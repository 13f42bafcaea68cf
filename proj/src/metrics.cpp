#include "accomp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <sstream>

#include "accomp/errors.hpp"

namespace accomp {

double rmsd(const AudioBuffer& estimate, const AudioBuffer& ref_solo, std::size_t block) {
  if (estimate.size() != ref_solo.size()) throw InvalidArgument("RMSD: length mismatch");
  if (block == 0) throw InvalidArgument("RMSD: block size must be > 0");
  const std::size_t n = estimate.size();
  if (n == 0) throw InvalidArgument("RMSD: empty signals");

  const std::size_t blocks = n < block ? 1 : n / block;
  const std::size_t len = n < block ? n : block;
  double sum = 0.0;
  for (std::size_t t = 0; t < blocks; ++t) {
    double acc = 0.0;
    for (std::size_t k = t * len; k < (t + 1) * len; ++k) {
      const double d = estimate.samples[k] - ref_solo.samples[k];
      acc += d * d;
    }
    sum += std::sqrt(acc / static_cast<double>(len));
  }
  const double mean = sum / static_cast<double>(blocks);
  if (!(mean > 0.0)) return kRmsdFloorDb;
  return std::max(kRmsdFloorDb, 20.0 * std::log10(mean));
}

namespace {

SpectralFrameSeq analysis(const AudioBuffer& x, const Window& window, std::size_t hop) {
  if (x.size() >= window.size()) return stft(x, window, hop);
  AudioBuffer padded = x;
  padded.samples.resize(window.size(), 0.0);
  return stft(padded, window, hop);
}

}  // namespace

SnrfResult snrf_detailed(const AudioBuffer& estimate, const AudioBuffer& ref_solo,
                         const ErbPartition& partition, const StftConfig& stft_cfg) {
  if (estimate.size() != ref_solo.size()) throw InvalidArgument("SNRF: length mismatch");
  stft_cfg.validate();
  if (partition.fft_size != stft_cfg.fft_size) throw InvalidArgument("SNRF: partition/FFT size mismatch");

  const Window window = stft_cfg.make();
  const SpectralFrameSeq est = analysis(estimate, window, stft_cfg.hop);
  const SpectralFrameSeq ref = analysis(ref_solo, window, stft_cfg.hop);

  SnrfResult result;
  result.per_segment.assign(ref.num_frames(), std::numeric_limits<double>::quiet_NaN());
  double total = 0.0;
  for (std::size_t t = 0; t < ref.num_frames(); ++t) {
    double seg_sum = 0.0;
    std::size_t seg_cells = 0;
    for (const BinRange& band : partition.bands) {
      double signal = 0.0;
      double noise = 0.0;
      for (std::size_t b = band.first; b <= band.last; ++b) {
        const double m = std::abs(ref.frames[t][b]);
        const double diff = std::abs(est.frames[t][b]) - m;
        signal += m * m;
        noise += diff * diff;
      }
      if (signal == 0.0) continue;
      const double width = static_cast<double>(band.size());
      signal /= width;
      noise /= width;
      const double cell = noise == 0.0 ? kSnrfClampDb
                                       : std::clamp(10.0 * std::log10(signal / noise), -kSnrfClampDb, kSnrfClampDb);
      seg_sum += cell;
      ++seg_cells;
    }
    if (seg_cells > 0) result.per_segment[t] = seg_sum / static_cast<double>(seg_cells);
    total += seg_sum;
    result.cells += seg_cells;
  }
  if (result.cells == 0) throw NoSignal("SNRF: reference solo is silent in every segment");
  result.snrf_db = total / static_cast<double>(result.cells);
  return result;
}

double snrf(const AudioBuffer& estimate, const AudioBuffer& ref_solo, const ErbPartition& partition,
            const StftConfig& stft_cfg) {
  return snrf_detailed(estimate, ref_solo, partition, stft_cfg).snrf_db;
}

double rtf(double elapsed_seconds, double duration_seconds) {
  if (!(duration_seconds > 0.0)) throw InvalidArgument("RTF: duration must be > 0");
  if (!(elapsed_seconds >= 0.0)) throw InvalidArgument("RTF: elapsed time must be >= 0");
  return elapsed_seconds / duration_seconds;
}

MetricsReport evaluate(const AudioBuffer& estimate, const AudioBuffer& ref_solo,
                       const EvaluateOptions& opts, double elapsed_seconds) {
  const ErbPartition partition =
      make_partition(opts.stft.fft_size, ref_solo.sample_rate, opts.cutoff, opts.num_bands);
  const SnrfResult s = snrf_detailed(estimate, ref_solo, partition, opts.stft);
  MetricsReport report;
  report.rmsd_db = rmsd(estimate, ref_solo, opts.block);
  report.snrf_db = s.snrf_db;
  report.rtf = ref_solo.duration() > 0.0 ? rtf(elapsed_seconds, ref_solo.duration()) : 0.0;
  report.per_segment = s.per_segment;
  report.params.block_size = opts.block;
  report.params.segments = s.per_segment.size();
  report.params.bands = partition.num_bands();
  return report;
}

std::string report_csv_header() { return "rmsd_db,snrf_db,rtf,block_size,segments,bands"; }

std::string report_csv_row(const MetricsReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(6) << r.rmsd_db << ',' << r.snrf_db << ',' << r.rtf << ','
      << r.params.block_size << ',' << r.params.segments << ',' << r.params.bands;
  return out.str();
}

std::string report_summary(const MetricsReport& r) {
  std::ostringstream out;
  out << std::fixed << std::setprecision(2);
  out << "RMSD  " << std::setw(9) << r.rmsd_db << " dB   (" << r.params.block_size << "-sample blocks)\n"
      << "SNRF  " << std::setw(9) << r.snrf_db << " dB   (" << r.params.segments << " segments x "
      << r.params.bands << " bands)\n"
      << "RTF   " << std::setw(9) << std::setprecision(3) << r.rtf << '\n';
  return out.str();
}

}  // namespace accomp

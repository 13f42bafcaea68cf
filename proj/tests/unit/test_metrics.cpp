#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>

#include "accomp/errors.hpp"
#include "accomp/metrics.hpp"
#include "support.hpp"

using namespace accomp;

namespace {

AudioBuffer buf(std::vector<double> x) { return AudioBuffer(std::move(x), 44100.0); }

// Windowed naive DFT of every frame, frames start at t*hop and are zero-padded at the end.
std::vector<std::vector<double>> naive_magnitudes(const std::vector<double>& x, const Window& w, std::size_t hop) {
  const std::size_t n = w.size();
  const std::size_t frames = (x.size() - n + hop - 1) / hop + 1;
  std::vector<double> c(n), s(n);
  for (std::size_t i = 0; i < n; ++i) {
    c[i] = std::cos(2.0 * std::numbers::pi * i / n);
    s[i] = std::sin(2.0 * std::numbers::pi * i / n);
  }
  std::vector<std::vector<double>> mag(frames, std::vector<double>(n / 2 + 1));
  for (std::size_t t = 0; t < frames; ++t) {
    for (std::size_t k = 0; k <= n / 2; ++k) {
      double re = 0.0, im = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        const std::size_t at = t * hop + i;
        if (at >= x.size()) break;
        const double v = w.coefficients[i] * x[at];
        re += v * c[(k * i) % n];
        im -= v * s[(k * i) % n];
      }
      mag[t][k] = std::hypot(re, im);
    }
  }
  return mag;
}

double snrf_oracle(const std::vector<double>& est, const std::vector<double>& ref, const ErbPartition& part,
                   const StftConfig& cfg) {
  const Window w = cfg.make();
  const auto e = naive_magnitudes(est, w, cfg.hop);
  const auto r = naive_magnitudes(ref, w, cfg.hop);
  double sum = 0.0;
  std::size_t cells = 0;
  for (std::size_t t = 0; t < r.size(); ++t) {
    for (const BinRange& band : part.bands) {
      double ps = 0.0, pn = 0.0;
      for (std::size_t b = band.first; b <= band.last; ++b) {
        ps += r[t][b] * r[t][b];
        pn += (e[t][b] - r[t][b]) * (e[t][b] - r[t][b]);
      }
      ps /= band.size();
      pn /= band.size();
      if (ps == 0.0) continue;
      sum += std::clamp(10.0 * std::log10(ps / pn), -100.0, 100.0);
      ++cells;
    }
  }
  return sum / cells;
}

}  // namespace

TEST_CASE("rmsd examples") {
  const auto x = testing::white_noise(44100, 1, 0.3);
  CHECK(rmsd(buf(x), buf(x)) == -120.0);

  auto off = x;
  for (double& v : off) v += 0.001;
  CHECK(rmsd(buf(off), buf(x)) == doctest::Approx(-60.0).epsilon(1e-9));

  std::vector<double> sine(44100);
  for (std::size_t k = 0; k < sine.size(); ++k) sine[k] = std::sin(2.0 * std::numbers::pi * 1000.0 * k / 44100.0);
  CHECK(rmsd(buf(std::vector<double>(44100, 0.0)), buf(sine)) == doctest::Approx(-3.0103).epsilon(1e-3));

  CHECK_THROWS_AS(rmsd(buf(x), buf(std::vector<double>(100, 0.0))), InvalidArgument);
}

TEST_CASE("rmsd symmetry and shift invariance") {
  const auto a = testing::white_noise(10240, 2, 0.2);
  const auto b = testing::white_noise(10240, 3, 0.2);
  CHECK(rmsd(buf(a), buf(b)) == rmsd(buf(b), buf(a)));
  auto a2 = a, b2 = b;
  for (double& v : a2) v += 0.25;
  for (double& v : b2) v += 0.25;
  CHECK(rmsd(buf(a2), buf(b2)) == doctest::Approx(rmsd(buf(a), buf(b))).epsilon(1e-9));
}

TEST_CASE("rmsd block averaging") {
  // first block deviates by 0.1, second by 0.3; a trailing partial block is ignored
  std::vector<double> e(2048 + 500, 0.0), r(2048 + 500, 0.0);
  for (std::size_t k = 0; k < 1024; ++k) e[k] = (k % 2 ? 0.1 : -0.1);
  for (std::size_t k = 1024; k < 2048; ++k) e[k] = 0.3;
  for (std::size_t k = 2048; k < e.size(); ++k) e[k] = 5.0;
  CHECK(rmsd(buf(e), buf(r)) == doctest::Approx(20.0 * std::log10(0.2)).epsilon(1e-12));
  // shorter than one block: one block over the whole signal
  CHECK(rmsd(buf(std::vector<double>(100, 0.5)), buf(std::vector<double>(100, 0.0))) ==
        doctest::Approx(20.0 * std::log10(0.5)));
}

TEST_CASE("snrf examples") {
  const auto x = testing::white_noise(44100, 4, 0.3);
  const StftConfig cfg;
  const ErbPartition part = make_partition(cfg.fft_size, 44100.0, 16000.0, 39);
  CHECK(snrf(buf(x), buf(x), part, cfg) == 100.0);
  CHECK(snrf(buf(std::vector<double>(x.size(), 0.0)), buf(x), part, cfg) == 0.0);
  CHECK_THROWS_AS(snrf(buf(x), buf(std::vector<double>(x.size(), 0.0)), part, cfg), NoSignal);
  CHECK_THROWS_AS(snrf(buf(x), buf(std::vector<double>(x.size() - 1, 0.0)), part, cfg), InvalidArgument);
  const ErbPartition other = make_partition(512, 44100.0, 16000.0, 4);
  CHECK_THROWS_AS(snrf(buf(x), buf(x), other, cfg), InvalidArgument);
}

TEST_CASE("snrf matches a direct double loop") {
  for (std::uint64_t seed : {10u, 11u}) {
    const auto ref = testing::white_noise(2 * 44100, seed, 0.3);
    auto est = ref;
    const auto noise = testing::white_noise(ref.size(), seed + 100, 0.1);
    for (std::size_t k = 0; k < est.size(); ++k) est[k] += noise[k];
    StftConfig cfg;
    cfg.fft_size = 512;
    cfg.hop = 256;
    const ErbPartition part = make_partition(512, 44100.0, 16000.0, 4);
    const double got = snrf(buf(est), buf(ref), part, cfg);
    const double want = snrf_oracle(est, ref, part, cfg);
    CHECK(std::abs(got - want) < 1e-9);
  }
}

TEST_CASE("snrf skips silent cells") {
  // reference silent in its second half; those segments drop out
  auto ref = testing::white_noise(8192, 8, 0.3);
  std::fill(ref.begin() + 4096, ref.end(), 0.0);
  auto est = ref;
  for (double& v : est) v *= 0.5;
  StftConfig cfg;
  cfg.fft_size = 512;
  cfg.hop = 256;
  const ErbPartition part = make_partition(512, 44100.0, 16000.0, 4);
  const SnrfResult r = snrf_detailed(buf(est), buf(ref), part, cfg);
  CHECK(r.cells > 0);
  CHECK(r.cells < r.per_segment.size() * part.num_bands());
  CHECK(std::isnan(r.per_segment.back()));
  CHECK(r.snrf_db == doctest::Approx(20.0 * std::log10(2.0)).epsilon(1e-9));  // |0.5X - X| = 0.5|X|
}

TEST_CASE("snrf falls as noise grows") {
  const auto ref = testing::white_noise(44100, 5, 0.3);
  const auto noise = testing::white_noise(ref.size(), 6, 1.0);
  const StftConfig cfg;
  const ErbPartition part = make_partition(cfg.fft_size, 44100.0, 16000.0, 39);
  double prev = snrf(buf(ref), buf(ref), part, cfg);
  for (double level : {0.001, 0.01, 0.03, 0.1, 0.3}) {
    auto est = ref;
    for (std::size_t k = 0; k < est.size(); ++k) est[k] += level * noise[k];
    const double s = snrf(buf(est), buf(ref), part, cfg);
    CHECK(s < prev);
    prev = s;
  }
}

TEST_CASE("rtf") {
  CHECK(rtf(10.0, 20.0) == 0.5);
  CHECK(rtf(20.0, 20.0) == 1.0);
  CHECK(rtf(0.0, 1.0) == 0.0);
  CHECK_THROWS_AS(rtf(1.0, 0.0), InvalidArgument);
  CHECK_THROWS_AS(rtf(1.0, -1.0), InvalidArgument);
  CHECK_THROWS_AS(rtf(-1.0, 1.0), InvalidArgument);
}

TEST_CASE("report") {
  const auto x = testing::white_noise(44100, 7, 0.3);
  const MetricsReport r = evaluate(buf(x), buf(x), {}, 0.25);
  CHECK(r.rmsd_db == -120.0);
  CHECK(r.snrf_db == 100.0);
  CHECK(r.rtf == doctest::Approx(0.25));
  CHECK(r.params.block_size == 1024);
  CHECK(r.params.bands == 39);
  CHECK(r.params.segments == r.per_segment.size());
  CHECK(report_csv_header() == "rmsd_db,snrf_db,rtf,block_size,segments,bands");
  CHECK(report_csv_row(r) == "-120.000000,100.000000,0.250000,1024,21,39");
}

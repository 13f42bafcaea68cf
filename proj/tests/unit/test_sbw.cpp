#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <cstdlib>

#include "accomp/erb.hpp"
#include "accomp/errors.hpp"
#include "accomp/sbw.hpp"
#include "support.hpp"

using namespace accomp;

namespace {

// Per-band sums written out bin by bin from the band table.
std::vector<double> brute_force_gains(const std::vector<Complex>& s0, const std::vector<Complex>& x,
                                      const ErbPartition& p, bool complex_cross) {
  std::vector<double> g(p.num_bands(), 0.0);
  double total = 0.0;
  for (const auto& v : s0) total += std::norm(v);
  for (std::size_t z = 0; z < p.num_bands(); ++z) {
    double r = 0.0, cross = 0.0;
    Complex ccross{};
    std::size_t count = 0;
    for (std::size_t b = 0; b < s0.size(); ++b) {
      if (p.band_of_bin[b] != z) continue;
      ++count;
      r += std::norm(s0[b]);
      cross += std::abs(std::conj(s0[b]) * x[b]);
      ccross += std::conj(s0[b]) * x[b];
    }
    r /= count;
    const double pz = (complex_cross ? std::abs(ccross) : cross) / count;
    if (r > 1e-12 * total / s0.size()) g[z] = pz / r;
  }
  return g;
}

}  // namespace

TEST_CASE("gains are 1 for X = S0 and 2 for X = 2 S0") {
  const ErbPartition p = make_partition(4096, 44100.0, 16000.0, 39);
  const auto s0 = testing::random_spectrum(p.num_bins(), 1);
  std::vector<Complex> x2(s0.size());
  for (std::size_t i = 0; i < s0.size(); ++i) x2[i] = 2.0 * s0[i];
  for (double g : subband_wiener_gains(s0, s0, p)) CHECK(g == doctest::Approx(1.0).epsilon(1e-14));
  for (double g : subband_wiener_gains(s0, x2, p)) CHECK(g == doctest::Approx(2.0).epsilon(1e-14));
}

TEST_CASE("gains match a brute-force evaluation") {
  const ErbPartition p = make_partition(16, 44100.0, 16000.0, 4);
  REQUIRE(p.num_bands() >= 2);
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto s0 = testing::random_spectrum(p.num_bins(), 10 + seed);
    const auto x = testing::random_spectrum(p.num_bins(), 100 + seed);
    for (bool cc : {false, true}) {
      const auto g = subband_wiener_gains(s0, x, p, cc);
      const auto ref = brute_force_gains(s0, x, p, cc);
      for (std::size_t z = 0; z < g.size(); ++z) CHECK(std::abs(g[z] - ref[z]) < 1e-12);
    }
  }
}

TEST_CASE("silent reference band gets zero gain") {
  const ErbPartition p = make_partition(64, 44100.0, 16000.0, 6);
  auto s0 = testing::random_spectrum(p.num_bins(), 3);
  const auto x = testing::random_spectrum(p.num_bins(), 4);
  for (std::size_t b = p.bands[2].first; b <= p.bands[2].last; ++b) s0[b] = {};
  const auto g = subband_wiener_gains(s0, x, p);
  CHECK(g[2] == 0.0);
  for (double v : g) CHECK((std::isfinite(v) && v >= 0.0));
  const std::vector<Complex> silent(p.num_bins());
  for (double v : subband_wiener_gains(silent, x, p)) CHECK(v == 0.0);
}

TEST_CASE("scaling the reference leaves the matched spectrum unchanged") {
  const ErbPartition p = make_partition(512, 44100.0, 16000.0, 20);
  const auto s0 = testing::random_spectrum(p.num_bins(), 5);
  const auto x = testing::random_spectrum(p.num_bins(), 6);
  const auto g = subband_wiener_gains(s0, x, p);
  const auto y = matched_spectrum(s0, g, p, 1.0);
  for (double c : {0.01, 3.0, 250.0}) {
    std::vector<Complex> sc(s0.size());
    for (std::size_t i = 0; i < s0.size(); ++i) sc[i] = c * s0[i];
    const auto gc = subband_wiener_gains(sc, x, p);
    for (std::size_t z = 0; z < g.size(); ++z) CHECK(gc[z] == doctest::Approx(g[z] / c).epsilon(1e-12));
    const auto yc = matched_spectrum(sc, gc, p, 1.0);
    for (std::size_t i = 0; i < y.size(); ++i) CHECK(std::abs(yc[i] - y[i]) <= 1e-12 * std::abs(y[i]) + 1e-300);
  }
}

TEST_CASE("exponent 0 passes the raw reference") {
  const ErbPartition p = make_partition(256, 44100.0, 16000.0, 16);
  const auto s0 = testing::random_spectrum(p.num_bins(), 7);
  const auto x = testing::random_spectrum(p.num_bins(), 8);
  CHECK(matched_spectrum(s0, subband_wiener_gains(s0, x, p), p, 0.0) == s0);
}

TEST_CASE("silent reference returns the mixture") {
  const AudioBuffer x = testing::noise_buffer(44100, 9, 0.1);
  const AudioBuffer e = sbw_cancel(x, AudioBuffer(x.size(), 44100.0), SbwConfig{});
  REQUIRE(e.size() == x.size());
  CHECK(testing::rel_error(e.samples, x.samples) < 1e-9);
}

TEST_CASE("pure accompaniment cancels exactly") {
  const AudioBuffer x = testing::noise_buffer(5 * 44100, 10, 0.1);
  const AudioBuffer e = sbw_cancel(x, x, SbwConfig{});
  CHECK(testing::db20(testing::rms_of(e.samples) / testing::rms_of(x.samples)) < -40.0);
}

TEST_CASE("output magnitude never exceeds the mixture") {
  const AudioBuffer s0 = testing::noise_buffer(30000, 11);
  AudioBuffer x = testing::noise_buffer(30000, 12, 0.5);
  const auto path = testing::fir(s0.samples, std::vector<double>{0.6, 0.3, -0.2});
  for (std::size_t k = 0; k < x.size(); ++k) x[k] += path[k];
  SbwConfig cfg;
  cfg.stft = {1024, 512};
  cfg.num_bands = 20;
  const auto e = sbw_cancel_frames(x, s0, cfg);
  const auto xs = stft_padded(x, cfg.stft.make(), 512);
  REQUIRE(e.num_frames() == xs.num_frames());
  for (std::size_t t = 0; t < e.num_frames(); ++t)
    for (std::size_t b = 0; b < e.bins(); ++b) CHECK(std::abs(e.frames[t][b]) <= std::abs(xs.frames[t][b]));
}

TEST_CASE("frame-parallel processing matches sequential") {
  const AudioBuffer s0 = testing::noise_buffer(60000, 13);
  const AudioBuffer x = testing::noise_buffer(60000, 14);
  setenv("ACCOMP_THREADS", "1", 1);
  const AudioBuffer a = sbw_cancel(x, s0, SbwConfig{});
  setenv("ACCOMP_THREADS", "3", 1);
  const AudioBuffer b = sbw_cancel(x, s0, SbwConfig{});
  unsetenv("ACCOMP_THREADS");
  CHECK(a.samples == b.samples);
}

TEST_CASE("configuration checks") {
  SbwConfig c;
  CHECK_NOTHROW(c.validate(44100.0));
  c.cutoff = 30000.0;
  CHECK_THROWS_AS(c.validate(44100.0), InvalidArgument);
  c = {};
  c.p = 0.0;
  CHECK_THROWS_AS(c.validate(44100.0), InvalidArgument);
  c = {};
  c.wiener_exponent = -1.0;
  CHECK_THROWS_AS(c.validate(44100.0), InvalidArgument);
  c = {};
  CHECK_THROWS_AS(sbw_cancel(AudioBuffer(5000, 44100.0), AudioBuffer(5001, 44100.0), c), InvalidArgument);
}

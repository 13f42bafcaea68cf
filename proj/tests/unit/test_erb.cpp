#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <map>

#include "accomp/erb.hpp"
#include "accomp/errors.hpp"

using namespace accomp;

namespace {

// Bin-by-bin scan, then renumber the occupied bands.
std::vector<std::size_t> brute_force_map(std::size_t n_fft, double fs, double cutoff, std::size_t z) {
  const double top = 21.4 * std::log10(1.0 + 4.37 * cutoff / 1000.0);
  std::vector<std::size_t> raw(n_fft / 2 + 1);
  for (std::size_t b = 0; b < raw.size(); ++b) {
    const double f = static_cast<double>(b) * fs / static_cast<double>(n_fft);
    if (f > cutoff) {
      raw[b] = z - 1;
      continue;
    }
    const double e = 21.4 * std::log10(1.0 + 4.37 * f / 1000.0);
    raw[b] = std::min<std::size_t>(z - 1, static_cast<std::size_t>(std::floor(z * e / top)));
  }
  std::map<std::size_t, std::size_t> renum;
  for (std::size_t v : raw) renum.emplace(v, 0);
  std::size_t next = 0;
  for (auto& [k, v] : renum) v = next++;
  for (auto& v : raw) v = renum[v];
  return raw;
}

}  // namespace

TEST_CASE("erbs values") {
  CHECK(erbs(0.0) == 0.0);
  CHECK(erbs(1.0) == doctest::Approx(21.4 * std::log10(5.37)).epsilon(1e-14));
  CHECK(erbs(1.0) == doctest::Approx(15.621).epsilon(1e-4));
  CHECK(std::abs(erbs(16.0) - 39.61) < 0.01);
  CHECK_THROWS_AS(erbs(-0.1), InvalidArgument);
}

TEST_CASE("erbs is strictly increasing") {
  double prev = -1.0;
  for (double f = 0.0; f <= 22.05; f += 0.01) {
    const double e = erbs(f);
    CHECK(e > prev);
    prev = e;
  }
}

TEST_CASE("39 bands at 44.1 kHz, 16 kHz cutoff, 4096-point FFT") {
  const ErbPartition p = make_partition(4096, 44100.0, 16000.0, 39);
  CHECK(p.num_bands() == 39);
  CHECK(p.num_bins() == 2049);
  CHECK(p.bands.front().size() < p.bands.back().size());
  CHECK(p.bands.front().first == 0);
  CHECK(p.bands.back().last == 2048);
  for (std::size_t z = 0; z < p.num_bands(); ++z) {
    CHECK(p.bands[z].size() >= 1);
    if (z > 0) CHECK(p.bands[z].first == p.bands[z - 1].last + 1);
    for (std::size_t b = p.bands[z].first; b <= p.bands[z].last; ++b) CHECK(p.band_of_bin[b] == z);
  }
}

TEST_CASE("partition matches a brute-force scan") {
  struct Case { std::size_t n; double fs, cutoff; std::size_t z; };
  for (const Case c : {Case{4096, 44100.0, 16000.0, 39}, Case{1024, 44100.0, 16000.0, 20},
                       Case{512, 48000.0, 24000.0, 8}, Case{256, 44100.0, 16000.0, 39}}) {
    const ErbPartition p = make_partition(c.n, c.fs, c.cutoff, c.z);
    CHECK(p.band_of_bin == brute_force_map(c.n, c.fs, c.cutoff, c.z));
    std::size_t covered = 0;
    for (const auto& band : p.bands) covered += band.size();
    CHECK(covered == c.n / 2 + 1);
  }
}

TEST_CASE("small transforms drop empty bands") {
  const ErbPartition p = make_partition(256, 44100.0, 16000.0, 39);
  CHECK(p.num_bands() < 39);
  for (std::size_t b = 1; b < p.num_bins(); ++b) CHECK(p.band_of_bin[b] >= p.band_of_bin[b - 1]);
}

TEST_CASE("one band holds every bin") {
  const ErbPartition p = make_partition(8, 44100.0, 22050.0, 1);
  REQUIRE(p.num_bands() == 1);
  CHECK(p.bands[0].first == 0);
  CHECK(p.bands[0].last == 4);
}

TEST_CASE("partition preconditions") {
  CHECK_THROWS_AS(make_partition(4096, 44100.0, 30000.0, 39), InvalidArgument);
  CHECK_THROWS_AS(make_partition(4096, 44100.0, 16000.0, 0), InvalidArgument);
}

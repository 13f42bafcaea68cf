#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <numbers>

#include "accomp/errors.hpp"
#include "accomp/scene.hpp"
#include "support.hpp"

using namespace accomp;

namespace {

SceneConfig small_config(std::uint64_t seed = 1) {
  SceneConfig cfg;
  cfg.solo = make_test_solo(2.0, seed);
  cfg.accompaniment_reference = make_test_accompaniment(2.0, seed + 1);
  cfg.mic_ir = make_mic_ir(13.7, 606, seed + 2);
  return cfg;
}

double energy_of(std::span<const double> x) {
  double e = 0.0;
  for (double v : x) e += v * v;
  return e;
}

}  // namespace

TEST_CASE("microphone IR shape") {
  const FirFilter h = make_mic_ir(13.7, 606, 1);
  REQUIRE(h.taps.size() == 606);
  CHECK(energy_of(h.taps) == doctest::Approx(1.0).epsilon(1e-12));
  // first tap is 1 before scaling, tail is unit-variance noise times the envelope
  CHECK(h.taps[0] > 0.0);
  CHECK(h.taps[0] > 0.1);
  CHECK(make_mic_ir(13.7, 606, 1).taps == h.taps);
  CHECK(make_mic_ir(13.7, 606, 2).taps != h.taps);
  CHECK(make_mic_ir(13.7, 1, 1).taps == std::vector<double>{1.0});
  CHECK_THROWS_AS(make_mic_ir(0.0, 606, 1), InvalidArgument);
  CHECK_THROWS_AS(make_mic_ir(13.7, 0, 1), InvalidArgument);
}

TEST_CASE("microphone IR decays about 54 dB between its first and last tenth") {
  for (std::uint64_t seed : {1u, 2u, 3u, 7u}) {
    const FirFilter h = make_mic_ir(13.7, 606, seed);
    const auto tenth = std::span(h.taps).subspan(0, 61);
    const auto last = std::span(h.taps).subspan(606 - 61);
    const double db = 10.0 * std::log10(energy_of(last) / energy_of(tenth));
    CHECK(db == doctest::Approx(-54.0).epsilon(3.0 / 54.0));
  }
}

TEST_CASE("distance law") {
  CHECK(spl_delta(1.0, 1.0) == 0.0);
  CHECK(spl_delta(1.0, 0.25) == doctest::Approx(12.04).epsilon(1e-3));
  CHECK(spl_delta(2.0, 1.0) == doctest::Approx(6.0206).epsilon(1e-4));
  CHECK_THROWS_AS(spl_delta(0.0, 1.0), InvalidArgument);
  CHECK_THROWS_AS(spl_delta(1.0, -2.0), InvalidArgument);
}

TEST_CASE("fractional delay") {
  const auto x = testing::white_noise(500, 1);
  const auto y = fractional_delay(x, 7.0);
  for (std::size_t k = 0; k < 7; ++k) CHECK(y[k] == 0.0);
  for (std::size_t k = 7; k < 500; ++k) CHECK(y[k] == x[k - 7]);
  CHECK(fractional_delay(x, 0.0) == x);

  std::vector<double> s(4000);
  const double f = 0.02;  // cycles per sample
  for (std::size_t k = 0; k < s.size(); ++k) s[k] = std::sin(2.0 * std::numbers::pi * f * k);
  const auto d = fractional_delay(s, 2.5);
  double worst = 0.0;
  for (std::size_t k = 100; k < 3900; ++k)
    worst = std::max(worst, std::abs(d[k] - std::sin(2.0 * std::numbers::pi * f * (k - 2.5))));
  CHECK(worst < 1e-3);
}

TEST_CASE("recorded level difference is met") {
  for (double ld : {-6.0, 0.0, 6.02, 12.0}) {
    SceneConfig cfg = small_config();
    cfg.level_diff = ld;
    const Scene sc = synth_siso(cfg);
    const double got = testing::db20(testing::rms_of(sc.recorded_accompaniment.samples) /
                                     testing::rms_of(sc.reference_solo.samples));
    CHECK(std::abs(got - ld) < 0.01);
    CHECK(sc.mixture.size() == cfg.solo.size());
    CHECK(sc.reference_solo.size() == cfg.solo.size());
    CHECK(sc.reference.samples == cfg.accompaniment_reference.samples);
  }
}

TEST_CASE("muted accompaniment leaves the filtered solo") {
  SceneConfig cfg = small_config();
  cfg.accompaniment_gain = 0.0;
  const Scene sc = synth_siso(cfg);
  CHECK(sc.mixture.samples == convolve_causal(cfg.solo.samples, cfg.mic_ir.taps));
}

TEST_CASE("mixture is solo plus accompaniment") {
  SceneConfig cfg = small_config();
  cfg.accompaniment_gain = 1.7;
  const Scene full = synth_siso(cfg);
  SceneConfig acc_only = cfg;
  std::fill(acc_only.solo.samples.begin(), acc_only.solo.samples.end(), 0.0);
  const Scene acc = synth_siso(acc_only);
  const auto hd = convolve_causal(cfg.solo.samples, cfg.mic_ir.taps);
  for (std::size_t k = 0; k < hd.size(); ++k)
    CHECK(std::abs(full.mixture[k] - acc.mixture[k] - hd[k]) < 1e-12);
}

TEST_CASE("accompaniment enters delayed by kappa") {
  SceneConfig cfg = small_config();
  cfg.mic_ir = FirFilter{{1.0}};
  cfg.channel_delay = 32;
  cfg.accompaniment_gain = 1.0;
  std::fill(cfg.solo.samples.begin(), cfg.solo.samples.end(), 0.0);
  const Scene sc = synth_siso(cfg);
  for (std::size_t k = 0; k < 32; ++k) CHECK(sc.mixture[k] == 0.0);
  for (std::size_t k = 32; k < sc.mixture.size(); ++k) CHECK(sc.mixture[k] == cfg.accompaniment_reference[k - 32]);
}

TEST_CASE("scene synthesis is deterministic") {
  SceneParams p;
  p.duration = 2.0;
  p.seed = 42;
  const Scene a = synth_scene(p), b = synth_scene(p);
  CHECK(a.mixture.samples == b.mixture.samples);
  CHECK(a.reference_solo.samples == b.reference_solo.samples);
  p.seed = 43;
  CHECK(synth_scene(p).mixture.samples != a.mixture.samples);
}

TEST_CASE("scene preconditions") {
  SceneConfig cfg = small_config();
  cfg.accompaniment_reference.samples.pop_back();
  CHECK_THROWS_AS(synth_siso(cfg), InvalidArgument);
  cfg = small_config();
  std::fill(cfg.solo.samples.begin(), cfg.solo.samples.end(), 0.0);
  CHECK_THROWS_AS(synth_siso(cfg), InvalidArgument);
  cfg = small_config();
  CHECK_THROWS_AS(synth_sido(cfg), InvalidArgument);
  cfg.sido = SidoConfig{};
  cfg.sido->spacing = 0.1;
  CHECK_THROWS_AS(synth_sido(cfg), InvalidArgument);
}

TEST_CASE("two-microphone geometry") {
  const SidoConfig g;
  CHECK(sido_solo_delay(g, 44100.0) == doctest::Approx(1.0).epsilon(0.005));
  for (double angle = -90.0; angle <= 90.0; angle += 7.5) {
    SidoConfig a = g;
    a.solo_angle = angle;
    CHECK(std::abs(sido_solo_delay(a, 44100.0)) <= a.spacing * 44100.0 / a.speed_of_sound + 1e-12);
  }

  SceneConfig cfg = small_config();
  cfg.sido = SidoConfig{};
  cfg.sido->solo_angle = 0.0;
  Scene sc = synth_sido(cfg);
  CHECK(sc.mixture2->samples == sc.mixture.samples);

  cfg.sido->solo_angle = 21.3;
  cfg.accompaniment_gain = 1.0;
  std::fill(cfg.solo.samples.begin(), cfg.solo.samples.end(), 0.0);
  sc = synth_sido(cfg);
  CHECK(sc.mixture2->samples == sc.mixture.samples);  // accompaniment parts identical
}

TEST_CASE("latency calibration") {
  const auto r = testing::white_noise(20000, 3);
  const AudioBuffer ref(r, 44100.0);
  CHECK(calibrate_latency(ref, ref, 100) == 0);
  const AudioBuffer rec(fractional_delay(r, 32.0), 44100.0);
  CHECK(calibrate_latency(rec, ref, 100) == 32);
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    AudioBuffer noisy = rec;
    const auto n = testing::white_noise(noisy.size(), 50 + seed, 0.1);
    for (std::size_t k = 0; k < noisy.size(); ++k) noisy[k] += n[k];
    CHECK(calibrate_latency(noisy, ref, 100) == 32);
  }
  CHECK_THROWS_AS(calibrate_latency(AudioBuffer(1000, 44100.0), ref, 10), NoSignal);
  CHECK_THROWS_AS(calibrate_latency(ref, ref, 20000), InvalidArgument);
}

TEST_CASE("test material") {
  const AudioBuffer s = make_test_solo(3.0, 5);
  const AudioBuffer a = make_test_accompaniment(3.0, 5);
  CHECK(s.size() == 3 * 44100);
  CHECK(a.size() == 3 * 44100);
  auto peak = [](const AudioBuffer& b) {
    double m = 0.0;
    for (double v : b.samples) m = std::max(m, std::abs(v));
    return m;
  };
  CHECK(peak(s) == doctest::Approx(0.5));
  CHECK(peak(a) == doctest::Approx(0.5));
  CHECK(make_test_solo(3.0, 5).samples == s.samples);
}

TEST_CASE("scene parameter text round trip") {
  SceneParams p;
  p.level_diff = 3.5;
  p.channel_delay = 17;
  p.sido = true;
  p.geometry.solo_angle = 30.0;
  const SceneParams q = parse_scene_params(format_scene_params(p));
  CHECK(q.level_diff == p.level_diff);
  CHECK(q.channel_delay == 17);
  CHECK(q.sido);
  CHECK(q.geometry.solo_angle == 30.0);
  CHECK(format_scene_params(q) == format_scene_params(p));

  const SceneParams r = parse_scene_params("# comment\nkappa = 5\n\nlevel_diff=1.5 # trailing\n");
  CHECK(r.channel_delay == 5);
  CHECK(r.level_diff == 1.5);
  CHECK_THROWS_AS(parse_scene_params("bogus=1\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_scene_params("level_diff=abc\n"), InvalidArgument);
  CHECK_THROWS_AS(parse_scene_params("no equals sign\n"), InvalidArgument);
}

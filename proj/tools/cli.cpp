#include "cli.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "accomp/adaptive.hpp"
#include "accomp/errors.hpp"
#include "accomp/metrics.hpp"
#include "accomp/sbw.hpp"
#include "accomp/scene.hpp"
#include "accomp/simo.hpp"
#include "accomp/wav.hpp"
#include "accomp/wiener.hpp"
#include "parallel.hpp"

namespace fs = std::filesystem;

namespace accomp::cli {

namespace {

enum class Algo { Anc, AncPw, Maw, MawSs, Sbw, SbwSimo };

const std::map<std::string, Algo> kAlgoNames = {
    {"anc", Algo::Anc}, {"anc-pw", Algo::AncPw}, {"maw", Algo::Maw},
    {"maw-ss", Algo::MawSs}, {"sbw", Algo::Sbw}, {"sbw-simo", Algo::SbwSimo},
};

std::string algo_name(Algo a) {
  for (const auto& [name, value] : kAlgoNames)
    if (value == a) return name;
  return "?";
}

// Everything any canceller needs; only the fields of the selected algorithm matter.
struct AlgoParams {
  Algo algo = Algo::Sbw;
  AncConfig anc;
  BlockWienerConfig maw;
  StftConfig stft;        // maw-ss subtraction framing
  double ss_p = 2.0;      // maw-ss norm
  SbwConfig sbw;
  ArrayGeometry geometry;
  std::optional<double> kappa;  // fixed MRC delay; tracked when empty
};

AlgoParams preset(Algo algo, const std::string& name) {
  AlgoParams p;
  p.algo = algo;
  if (name == "none") {
    if (algo == Algo::AncPw) p.anc.prewhiten = true;
    return p;
  }
  if (name != "paper-v") throw InvalidArgument("unknown preset '" + name + "'");
  switch (algo) {
    case Algo::Anc:
      p.anc.taps = 1023;
      p.anc.mu = 0.10;
      break;
    case Algo::AncPw:
      p.anc.taps = 1023;
      p.anc.mu = 0.01;
      p.anc.order = 15;
      p.anc.prewhiten = true;
      break;
    case Algo::Maw:
    case Algo::MawSs:
      p.maw.taps = 1023;
      p.maw.block = 16384;
      p.maw.hop = 64;
      p.stft.fft_size = 4096;
      p.stft.hop = 2048;
      p.ss_p = 2.0;
      break;
    case Algo::Sbw:
    case Algo::SbwSimo:
      p.sbw.stft.fft_size = 4096;
      p.sbw.stft.hop = 2048;
      p.sbw.num_bands = 39;
      break;
  }
  return p;
}

double to_double(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::logic_error&) {
    used = 0;
  }
  if (used == 0 || used != v.size()) throw InvalidArgument("bad value for " + key + ": '" + v + "'");
  return out;
}

std::size_t to_size(const std::string& key, const std::string& v) {
  const double d = to_double(key, v);
  if (d < 0.0 || d != std::floor(d)) throw InvalidArgument(key + " must be a non-negative integer");
  return static_cast<std::size_t>(d);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
  if (v == "0" || v == "false" || v == "no" || v == "off") return false;
  throw InvalidArgument("bad value for " + key + ": '" + v + "'");
}

WindowKind to_window(const std::string& v) {
  if (v == "kbd") return WindowKind::Kbd;
  if (v == "hann") return WindowKind::Hann;
  if (v == "rect") return WindowKind::Rect;
  throw InvalidArgument("unknown window '" + v + "'");
}

void set_stft_key(StftConfig& s, const std::string& key, const std::string& v) {
  if (key == "fft-size") s.fft_size = to_size(key, v);
  else if (key == "fft-hop") s.hop = to_size(key, v);
  else if (key == "window") s.window = to_window(v);
  else if (key == "shape") s.shape = to_double(key, v);
}

bool is_stft_key(const std::string& key) {
  return key == "fft-size" || key == "fft-hop" || key == "window" || key == "shape";
}

void apply_override(AlgoParams& p, const std::string& key, const std::string& v) {
  auto reject = [&] {
    throw InvalidArgument("parameter '" + key + "' does not apply to " + algo_name(p.algo));
  };
  switch (p.algo) {
    case Algo::Anc:
    case Algo::AncPw:
      if (key == "taps") p.anc.taps = to_size(key, v);
      else if (key == "mu") p.anc.mu = to_double(key, v);
      else if (key == "normalized") p.anc.normalized = to_bool(key, v);
      else if (key == "order" && p.algo == Algo::AncPw) p.anc.order = to_size(key, v);
      else if (key == "refresh" && p.algo == Algo::AncPw) p.anc.refresh_interval = to_size(key, v);
      else reject();
      return;
    case Algo::Maw:
    case Algo::MawSs:
      if (key == "taps") p.maw.taps = to_size(key, v);
      else if (key == "block") p.maw.block = to_size(key, v);
      else if (key == "hop") p.maw.hop = to_size(key, v);
      else if (key == "regularization") p.maw.regularization = to_double(key, v);
      else if (key == "interpolate") p.maw.interpolate = to_bool(key, v);
      else if (p.algo == Algo::MawSs && is_stft_key(key)) set_stft_key(p.stft, key, v);
      else if (p.algo == Algo::MawSs && key == "p") p.ss_p = to_double(key, v);
      else reject();
      return;
    case Algo::Sbw:
    case Algo::SbwSimo:
      if (is_stft_key(key)) set_stft_key(p.sbw.stft, key, v);
      else if (key == "bands") p.sbw.num_bands = to_size(key, v);
      else if (key == "cutoff") p.sbw.cutoff = to_double(key, v);
      else if (key == "p") p.sbw.p = to_double(key, v);
      else if (key == "exponent") p.sbw.wiener_exponent = to_double(key, v);
      else if (key == "complex-cross") p.sbw.complex_cross = to_bool(key, v);
      else if (p.algo == Algo::SbwSimo && key == "spacing") p.geometry.spacing = to_double(key, v);
      else if (p.algo == Algo::SbwSimo && key == "f-max") p.geometry.f_max = to_double(key, v);
      else if (p.algo == Algo::SbwSimo && key == "speed") p.geometry.speed_of_sound = to_double(key, v);
      else if (p.algo == Algo::SbwSimo && key == "kappa") p.kappa = to_double(key, v);
      else reject();
      return;
  }
}

void validate(const AlgoParams& p, double sample_rate) {
  switch (p.algo) {
    case Algo::Anc:
    case Algo::AncPw:
      p.anc.validate();
      break;
    case Algo::Maw:
      p.maw.validate();
      break;
    case Algo::MawSs:
      p.maw.validate();
      p.stft.validate();
      if (!(p.ss_p > 0.0)) throw InvalidArgument("p must be > 0");
      break;
    case Algo::Sbw:
      p.sbw.validate(sample_rate);
      break;
    case Algo::SbwSimo: {
      p.sbw.validate(sample_rate);
      ArrayGeometry g = p.geometry;
      g.sample_rate = sample_rate;
      g.validate();
      if (p.kappa && !std::isfinite(*p.kappa)) throw InvalidArgument("kappa must be finite");
      break;
    }
  }
}

AudioBuffer cancel_with(const AlgoParams& p, const AudioBuffer& x1, const AudioBuffer* x2,
                        const AudioBuffer& ref) {
  switch (p.algo) {
    case Algo::Anc:
    case Algo::AncPw:
      return anc_cancel(x1, ref, p.anc);
    case Algo::Maw:
      return maw_cancel(x1, ref, p.maw);
    case Algo::MawSs:
      return maw_ss_cancel(x1, ref, p.maw, p.stft, p.ss_p);
    case Algo::Sbw:
      return sbw_cancel(x1, ref, p.sbw);
    case Algo::SbwSimo: {
      if (x2 == nullptr) throw InvalidArgument("sbw-simo needs a second microphone channel");
      ArrayGeometry g = p.geometry;
      g.sample_rate = x1.sample_rate;
      return sbw_simo_cancel(x1, *x2, ref, p.sbw, g, p.kappa);
    }
  }
  throw InvalidArgument("unknown algorithm");
}

void write_text_atomic(const fs::path& path, const std::string& text) {
  fs::path part = path;
  part += ".part";
  {
    std::ofstream f(part, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot open " + part.string() + " for writing");
    f << text;
    f.flush();
    if (!f) throw IoError("write failed: " + part.string());
  }
  std::error_code ec;
  fs::rename(part, path, ec);
  if (ec) {
    fs::remove(part);
    throw IoError("cannot rename " + part.string() + ": " + ec.message());
  }
}

std::vector<std::string> split_list(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream in(s);
  std::string item;
  while (std::getline(in, item, ',')) {
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::pair<std::string, std::string> split_kv(const std::string& s) {
  const auto eq = s.find('=');
  if (eq == std::string::npos || eq == 0) throw InvalidArgument("expected key=value, got '" + s + "'");
  return {s.substr(0, eq), s.substr(eq + 1)};
}

std::string shortest(double v) {
  char buf[32];
  const auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

// ---- simulate -------------------------------------------------------------

struct SimulateArgs {
  std::string solo, accomp, out_dir = ".";
  SceneParams params;
  std::string format = "float32";
};

SampleFormat to_format(const std::string& v) {
  if (v == "float32") return SampleFormat::Float32;
  if (v == "pcm16") return SampleFormat::Pcm16;
  if (v == "pcm24") return SampleFormat::Pcm24;
  throw InvalidArgument("unknown sample format '" + v + "'");
}

int do_simulate(const SimulateArgs& a, std::ostream& out) {
  const SampleFormat format = to_format(a.format);
  if (a.solo.empty() != a.accomp.empty())
    throw InvalidArgument("--solo and --accomp must be given together");
  if (a.params.sido) {
    ArrayGeometry g{a.params.geometry.spacing, a.params.geometry.speed_of_sound,
                    a.params.geometry.f_max};
    g.validate();
  }

  Scene scene;
  if (a.solo.empty()) {
    scene = synth_scene(a.params);
  } else {
    AudioBuffer d = read_mono(a.solo);
    AudioBuffer s0 = read_mono(a.accomp);
    if (d.sample_rate != s0.sample_rate) throw InvalidArgument("solo and accompaniment rates differ");
    const std::size_t n = std::min(d.size(), s0.size());
    d.samples.resize(n);
    s0.samples.resize(n);
    const SceneConfig cfg = scene_config(a.params, std::move(d), std::move(s0));
    scene = a.params.sido ? synth_sido(cfg) : synth_siso(cfg);
  }

  const fs::path dir(a.out_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw IoError("cannot create " + dir.string() + ": " + ec.message());

  if (scene.mixture2) write_wav(dir / "mixture.wav", {scene.mixture, *scene.mixture2}, format);
  else write_wav(dir / "mixture.wav", {scene.mixture}, format);
  write_wav(dir / "reference.wav", {scene.reference}, format);
  write_wav(dir / "reference_solo.wav", {scene.reference_solo}, format);

  std::ostringstream manifest;
  manifest << "# accompaniment cancellation scene\n"
           << "# mixture=mixture.wav" << (scene.mixture2 ? " (2 channels)" : "") << '\n'
           << "# reference=reference.wav\n"
           << "# reference_solo=reference_solo.wav\n"
           << "# solo_source=" << (a.solo.empty() ? "synthetic" : a.solo) << '\n'
           << "# accomp_source=" << (a.accomp.empty() ? "synthetic" : a.accomp) << '\n'
           << "# gain=" << shortest(scene.gain) << '\n';
  if (scene.mixture2) manifest << "# solo_delay=" << shortest(scene.solo_delay) << '\n';
  manifest << format_scene_params(a.params);
  write_text_atomic(dir / "scene.txt", manifest.str());

  out << "wrote scene to " << dir.string() << '\n';
  return kOk;
}

// ---- cancel ---------------------------------------------------------------

struct CancelArgs {
  std::string algo, preset = "none", mixture, reference, output, mixture2, timing;
  std::vector<std::string> overrides;
  std::string format = "float32";
};

int do_cancel(const CancelArgs& a, std::ostream& out) {
  const auto it = kAlgoNames.find(a.algo);
  if (it == kAlgoNames.end()) throw InvalidArgument("unknown algorithm '" + a.algo + "'");
  AlgoParams p = preset(it->second, a.preset);
  for (const auto& kv : a.overrides) {
    const auto [key, value] = split_kv(kv);
    apply_override(p, key, value);
  }
  const SampleFormat format = to_format(a.format);
  // Parameters are checked before any audio is touched; the rate-dependent
  // checks run again once the real rate is known.
  validate(p, kDefaultSampleRate);

  const WavData mix = read_wav(a.mixture);
  const AudioBuffer ref = read_mono(a.reference);
  std::optional<AudioBuffer> second;
  if (!a.mixture2.empty()) second = read_mono(a.mixture2);
  else if (mix.channels.size() == 2) second = mix.channels[1];
  if (p.algo != Algo::SbwSimo && mix.channels.size() != 1)
    throw InvalidArgument(a.algo + " expects a mono mixture");
  if (mix.channels.size() > 2) throw InvalidArgument("mixture has more than two channels");
  const AudioBuffer& x1 = mix.channels.front();
  if (x1.sample_rate != ref.sample_rate || (second && second->sample_rate != x1.sample_rate))
    throw InvalidArgument("sample rates differ between inputs");
  validate(p, x1.sample_rate);

  const auto t0 = std::chrono::steady_clock::now();
  const AudioBuffer est = cancel_with(p, x1, second ? &*second : nullptr, ref);
  const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

  write_wav(a.output, {est}, format);
  std::ostringstream timing;
  timing << std::fixed << std::setprecision(6) << "algo=" << a.algo << " elapsed_s=" << elapsed
         << " rtf=" << rtf(elapsed, x1.duration()) << '\n';
  out << timing.str();
  if (!a.timing.empty()) write_text_atomic(a.timing, timing.str());
  return kOk;
}

// ---- evaluate -------------------------------------------------------------

struct EvaluateArgs {
  std::string estimate, ref_solo, output;
  double elapsed = 0.0;
  std::size_t fft_size = 4096, hop = 2048, bands = 39, block = kRmsdBlock;
  double cutoff = 16000.0;
  bool per_segment = false;
};

int do_evaluate(const EvaluateArgs& a, std::ostream& out) {
  EvaluateOptions opts;
  opts.stft.fft_size = a.fft_size;
  opts.stft.hop = a.hop;
  opts.num_bands = a.bands;
  opts.cutoff = a.cutoff;
  opts.block = a.block;
  opts.stft.validate();
  if (a.bands < 1) throw InvalidArgument("bands must be >= 1");
  if (a.block < 1) throw InvalidArgument("block must be >= 1");
  if (!(a.elapsed >= 0.0)) throw InvalidArgument("elapsed must be >= 0");

  const AudioBuffer est = read_mono(a.estimate);
  const AudioBuffer ref = read_mono(a.ref_solo);
  if (est.sample_rate != ref.sample_rate) throw InvalidArgument("sample rates differ between inputs");
  if (!(a.cutoff > 0.0 && a.cutoff <= ref.sample_rate / 2))
    throw InvalidArgument("cutoff must lie in (0, fs/2]");

  const MetricsReport r = evaluate(est, ref, opts, a.elapsed);
  std::string csv = report_csv_header() + '\n' + report_csv_row(r) + '\n';
  if (a.per_segment) {
    std::ostringstream seg;
    seg << "\nsegment,snrf_db\n" << std::fixed << std::setprecision(6);
    for (std::size_t t = 0; t < r.per_segment.size(); ++t) seg << t << ',' << r.per_segment[t] << '\n';
    csv += seg.str();
  }
  if (a.output.empty()) {
    out << csv;
  } else {
    write_text_atomic(a.output, csv);
    out << report_summary(r);
  }
  return kOk;
}

// ---- sweep ----------------------------------------------------------------

struct SweepArgs {
  std::string param, values, algo, out_path, points_dir;
  std::size_t scenes = 3;
  double duration = 10.0;
  std::uint64_t seed = 1;
};

const std::map<std::string, std::string> kSweepDefaults = {
    {"fft-size", "512,1024,2048,4096,8192,16384"},
    {"window-shape", "1,2,3,4,5,6,8"},
    {"subbands", "10,20,30,39,50,60"},
    {"wiener-exponent", "0.25,0.5,0.75,1,1.5,2"},
    {"p-norm", "0.5,1,1.5,2,3"},
    {"level-diff", "-6,0,6.02,12,18"},
    {"delay-mismatch", "-1024,-256,-64,0,64,256,1024"},
    {"mic-spacing", "0.005,0.0107,0.0214,0.0428,0.0857"},
    {"angle-mismatch", "-40,-20,-10,0,10,20,40"},
};

std::vector<double> shifted(const std::vector<double>& x, long delay) {
  std::vector<double> y(x.size(), 0.0);
  const long n = static_cast<long>(x.size());
  for (long k = 0; k < n; ++k) {
    const long m = k - delay;
    if (m >= 0 && m < n) y[static_cast<std::size_t>(k)] = x[static_cast<std::size_t>(m)];
  }
  return y;
}

struct PointResult {
  double rmsd_db = 0.0;
  double snrf_db = 0.0;
};

PointResult run_point(const SweepArgs& a, Algo algo, double value, std::size_t scene_index) {
  SceneParams sp;
  sp.duration = a.duration;
  sp.seed = a.seed + scene_index;
  sp.sido = algo == Algo::SbwSimo;
  AlgoParams p = preset(algo, "paper-v");
  long ref_shift = 0;
  const std::string& k = a.param;

  if (k == "fft-size") {
    const auto n = static_cast<std::size_t>(value);
    if (algo == Algo::MawSs) p.stft = {n, n / 2, p.stft.window, p.stft.shape};
    else p.sbw.stft = {n, n / 2, p.sbw.stft.window, p.sbw.stft.shape};
  } else if (k == "window-shape") {
    (algo == Algo::MawSs ? p.stft : p.sbw.stft).shape = value;
  } else if (k == "subbands") {
    p.sbw.num_bands = static_cast<std::size_t>(value);
  } else if (k == "wiener-exponent") {
    p.sbw.wiener_exponent = value;
  } else if (k == "p-norm") {
    if (algo == Algo::MawSs) p.ss_p = value;
    else p.sbw.p = value;
  } else if (k == "level-diff") {
    sp.level_diff = value;
  } else if (k == "delay-mismatch") {
    // The canceller believes the channel delay is kappa - value.
    ref_shift = static_cast<long>(sp.channel_delay) - static_cast<long>(value);
  } else if (k == "mic-spacing") {
    sp.geometry.spacing = value;
    sp.geometry.f_max = std::min(sp.geometry.f_max, sp.geometry.speed_of_sound / (2.0 * value));
    p.geometry.spacing = value;
    p.geometry.f_max = sp.geometry.f_max;
  } else if (k == "angle-mismatch") {
    ArrayGeometry g = p.geometry;
    const double believed = std::clamp(sp.geometry.solo_angle + value, -90.0, 90.0);
    p.kappa = delay_from_angle(believed, g);
  }

  const Scene scene = synth_scene(sp);
  AudioBuffer ref = scene.reference;
  if (k == "delay-mismatch") {
    // Undo the known part of the channel delay, leaving the mismatch.
    ref.samples = shifted(ref.samples, ref_shift);
  }
  validate(p, scene.mixture.sample_rate);
  const AudioBuffer est =
      cancel_with(p, scene.mixture, scene.mixture2 ? &*scene.mixture2 : nullptr, ref);
  const MetricsReport r = evaluate(est, scene.reference_solo);
  return {r.rmsd_db, r.snrf_db};
}

std::string fmt(double v) {
  std::ostringstream s;
  s << std::fixed << std::setprecision(6) << v;
  return s.str();
}

int do_sweep(const SweepArgs& a, std::ostream& out) {
  const auto def = kSweepDefaults.find(a.param);
  if (def == kSweepDefaults.end()) throw InvalidArgument("unknown sweep parameter '" + a.param + "'");
  const bool spatial = a.param == "mic-spacing" || a.param == "angle-mismatch";
  std::string algo_text = a.algo.empty() ? (spatial ? "sbw-simo" : "sbw") : a.algo;
  const auto it = kAlgoNames.find(algo_text);
  if (it == kAlgoNames.end()) throw InvalidArgument("unknown algorithm '" + algo_text + "'");
  const Algo algo = it->second;
  if (spatial && algo != Algo::SbwSimo) throw InvalidArgument(a.param + " sweeps need --algo sbw-simo");
  const bool spectral = a.param == "fft-size" || a.param == "window-shape" || a.param == "p-norm";
  const bool sbw_only = a.param == "subbands" || a.param == "wiener-exponent";
  if ((sbw_only || spectral) && algo != Algo::Sbw && algo != Algo::SbwSimo &&
      !(spectral && algo == Algo::MawSs))
    throw InvalidArgument(a.param + " does not apply to " + algo_text);
  if (a.scenes < 1) throw InvalidArgument("--scenes must be >= 1");
  if (!(a.duration > 0.0)) throw InvalidArgument("--duration must be > 0");

  const std::vector<std::string> tokens = split_list(a.values.empty() ? def->second : a.values);
  if (tokens.empty()) throw InvalidArgument("empty value list");
  std::vector<double> values;
  for (const auto& t : tokens) values.push_back(to_double(a.param, t));

  // Preconditions for every point before any work starts.
  for (const double v : values) {
    if (a.param == "fft-size" && (v < 4 || v != std::floor(v)))
      throw InvalidArgument("fft-size values must be integers >= 4");
    if (a.param == "subbands" && (v < 1 || v != std::floor(v)))
      throw InvalidArgument("subbands values must be integers >= 1");
    if (a.param == "mic-spacing" && !(v > 0.0)) throw InvalidArgument("mic-spacing must be > 0");
    if (a.param == "delay-mismatch" && v != std::floor(v))
      throw InvalidArgument("delay-mismatch values must be integers");
  }

  if (!a.points_dir.empty()) {
    std::error_code ec;
    fs::create_directories(a.points_dir, ec);
    if (ec) throw IoError("cannot create " + a.points_dir + ": " + ec.message());
  }

  const std::size_t count = values.size() * a.scenes;
  std::vector<PointResult> results(count);
  detail::parallel_for(count, [&](std::size_t i) {
    const std::size_t vi = i / a.scenes;
    const std::size_t si = i % a.scenes;
    results[i] = run_point(a, algo, values[vi], si);
    if (!a.points_dir.empty()) {
      const fs::path path = fs::path(a.points_dir) /
                            (a.param + "_" + std::to_string(vi) + "_" + std::to_string(si) + ".csv");
      write_text_atomic(path, "value,scene,rmsd_db,snrf_db\n" + tokens[vi] + ',' + std::to_string(si) +
                                  ',' + fmt(results[i].rmsd_db) + ',' + fmt(results[i].snrf_db) + '\n');
    }
  });

  std::ostringstream csv;
  csv << "param,algo,value,scene,seed,metric,measurement,median,q25,q75\n";
  for (std::size_t vi = 0; vi < values.size(); ++vi) {
    for (const char* metric : {"rmsd_db", "snrf_db"}) {
      const bool is_rmsd = std::string(metric) == "rmsd_db";
      std::vector<double> m;
      for (std::size_t si = 0; si < a.scenes; ++si) {
        const PointResult& r = results[vi * a.scenes + si];
        m.push_back(is_rmsd ? r.rmsd_db : r.snrf_db);
      }
      const std::string stats = fmt(quantile(m, 0.5)) + ',' + fmt(quantile(m, 0.25)) + ',' +
                                fmt(quantile(m, 0.75));
      for (std::size_t si = 0; si < a.scenes; ++si) {
        csv << a.param << ',' << algo_text << ',' << tokens[vi] << ',' << si << ',' << a.seed + si << ','
            << metric << ',' << fmt(m[si]) << ',' << stats << '\n';
      }
    }
  }
  if (a.out_path.empty()) out << csv.str();
  else write_text_atomic(a.out_path, csv.str());
  return kOk;
}

}  // namespace

double quantile(std::vector<double> values, double q) {
  if (values.empty()) throw InvalidArgument("quantile of an empty set");
  std::sort(values.begin(), values.end());
  const double pos = q * static_cast<double>(values.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  return values[lo] + (pos - static_cast<double>(lo)) * (values[hi] - values[lo]);
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Accompaniment cancellation toolkit", "accomp"};
  app.require_subcommand(1);

  SimulateArgs sim;
  auto* simulate = app.add_subcommand("simulate", "synthesize a mixture scene");
  simulate->add_option("--solo", sim.solo, "solo WAV d(k); synthetic when omitted");
  simulate->add_option("--accomp", sim.accomp, "accompaniment reference WAV s0(k)");
  simulate->add_option("--out-dir,-o", sim.out_dir, "output directory");
  simulate->add_option("--level-diff", sim.params.level_diff, "accompaniment minus solo RMS, dB");
  simulate->add_option("--kappa", sim.params.channel_delay, "channel delay, samples");
  simulate->add_option("--rt-ms", sim.params.rt_ms, "microphone reverberation time, ms");
  simulate->add_option("--ir-length", sim.params.ir_length, "microphone IR length, samples");
  simulate->add_option("--seed", sim.params.seed, "random seed");
  simulate->add_option("--duration", sim.params.duration, "synthetic material length, s");
  simulate->add_flag("--sido", sim.params.sido, "two-microphone scene");
  simulate->add_option("--spacing", sim.params.geometry.spacing, "microphone spacing, m");
  simulate->add_option("--solo-angle", sim.params.geometry.solo_angle, "solo angle, degrees");
  simulate->add_option("--accomp-angle", sim.params.geometry.accomp_angle, "accompaniment angle, degrees");
  simulate->add_option("--format", sim.format, "float32 | pcm16 | pcm24");

  CancelArgs can;
  auto* cancel = app.add_subcommand("cancel", "remove the accompaniment from a mixture");
  cancel->add_option("--algo,-a", can.algo, "anc | anc-pw | maw | maw-ss | sbw | sbw-simo")->required();
  cancel->add_option("--preset", can.preset, "paper-v | none");
  cancel->add_option("--set", can.overrides, "parameter override key=value (repeatable)");
  cancel->add_option("--mix2", can.mixture2, "second microphone WAV for sbw-simo");
  cancel->add_option("--timing", can.timing, "write the timing line to this file");
  cancel->add_option("--format", can.format, "float32 | pcm16 | pcm24");
  cancel->add_option("mixture", can.mixture, "mixture WAV (stereo allowed for sbw-simo)")->required();
  cancel->add_option("reference", can.reference, "accompaniment reference WAV")->required();
  cancel->add_option("output", can.output, "estimate WAV")->required();

  EvaluateArgs ev;
  auto* evaluate_cmd = app.add_subcommand("evaluate", "RMSD / SNRF / RTF of an estimate");
  evaluate_cmd->add_option("estimate", ev.estimate, "estimate WAV")->required();
  evaluate_cmd->add_option("ref_solo", ev.ref_solo, "reference solo WAV")->required();
  evaluate_cmd->add_option("--out", ev.output, "CSV path; stdout when omitted");
  evaluate_cmd->add_option("--elapsed", ev.elapsed, "processing time for the RTF, s");
  evaluate_cmd->add_option("--fft-size", ev.fft_size);
  evaluate_cmd->add_option("--fft-hop", ev.hop);
  evaluate_cmd->add_option("--bands", ev.bands);
  evaluate_cmd->add_option("--cutoff", ev.cutoff);
  evaluate_cmd->add_option("--block", ev.block);
  evaluate_cmd->add_flag("--per-segment", ev.per_segment, "append per-segment SNRF");

  SweepArgs sw;
  auto* sweep = app.add_subcommand("sweep", "vary one parameter over synthetic scenes");
  sweep->add_option("--param,-p", sw.param,
                    "fft-size | window-shape | subbands | wiener-exponent | p-norm | level-diff | "
                    "delay-mismatch | mic-spacing | angle-mismatch")
      ->required();
  sweep->add_option("--values", sw.values, "comma-separated list");
  sweep->add_option("--algo", sw.algo, "canceller (default sbw, sbw-simo for spatial sweeps)");
  sweep->add_option("--scenes", sw.scenes, "scenes per value");
  sweep->add_option("--duration", sw.duration, "scene length, s");
  sweep->add_option("--seed", sw.seed, "seed of the first scene");
  sweep->add_option("--out", sw.out_path, "CSV path; stdout when omitted");
  sweep->add_option("--points-dir", sw.points_dir, "also write one CSV per point here");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kBadArgs;
  }

  try {
    if (*simulate) return do_simulate(sim, out);
    if (*cancel) return do_cancel(can, out);
    if (*evaluate_cmd) return do_evaluate(ev, out);
    if (*sweep) return do_sweep(sw, out);
  } catch (const InvalidArgument& e) {
    err << "error: " << e.what() << '\n';
    return kBadArgs;
  } catch (const IoError& e) {
    err << "io error: " << e.what() << '\n';
    return kIoFailure;
  } catch (const SolverFailure& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  } catch (const NoSignal& e) {
    err << "numeric failure: " << e.what() << '\n';
    return kNumericFailure;
  }
  return kBadArgs;
}

}  // namespace accomp::cli

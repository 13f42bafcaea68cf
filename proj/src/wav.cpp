#include "accomp/wav.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "accomp/errors.hpp"

namespace accomp {
namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint16_t kFormatExtensible = 0xFFFE;

std::uint32_t le32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | static_cast<std::uint32_t>(p[1]) << 8 |
         static_cast<std::uint32_t>(p[2]) << 16 | static_cast<std::uint32_t>(p[3]) << 24;
}
std::uint16_t le16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | p[1] << 8);
}

void put32(std::string& out, std::uint32_t v) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((v >> (8 * i)) & 0xFF));
}
void put16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xFF));
  out.push_back(static_cast<char>(v >> 8));
}

}  // namespace

WavData read_wav(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open '" + path.string() + "'");
  std::vector<unsigned char> bytes((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (bytes.size() < 12 || std::memcmp(bytes.data(), "RIFF", 4) != 0 || std::memcmp(bytes.data() + 8, "WAVE", 4) != 0)
    throw IoError("'" + path.string() + "' is not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  const unsigned char* data = nullptr;
  std::size_t data_size = 0;
  std::size_t pos = 12;
  while (pos + 8 <= bytes.size()) {
    const unsigned char* chunk = bytes.data() + pos;
    const std::size_t size = le32(chunk + 4);
    const std::size_t body = pos + 8;
    if (std::memcmp(chunk, "fmt ", 4) == 0) {
      if (size < 16 || body + size > bytes.size()) throw IoError("'" + path.string() + "': truncated fmt chunk");
      format = le16(bytes.data() + body);
      channels = le16(bytes.data() + body + 2);
      rate = le32(bytes.data() + body + 4);
      bits = le16(bytes.data() + body + 14);
      if (format == kFormatExtensible && size >= 26) format = le16(bytes.data() + body + 24);
    } else if (std::memcmp(chunk, "data", 4) == 0) {
      data = bytes.data() + body;
      data_size = std::min(size, bytes.size() - body);
    }
    pos = body + size + (size & 1);
  }
  if (channels == 0 || rate == 0) throw IoError("'" + path.string() + "': missing fmt chunk");
  if (!data) throw IoError("'" + path.string() + "': missing data chunk");

  WavData wav;
  if (format == kFormatPcm && bits == 16) wav.format = SampleFormat::Pcm16;
  else if (format == kFormatPcm && bits == 24) wav.format = SampleFormat::Pcm24;
  else if (format == kFormatFloat && bits == 32) wav.format = SampleFormat::Float32;
  else throw IoError("'" + path.string() + "': unsupported sample format");

  const std::size_t width = bits / 8;
  const std::size_t frames = data_size / (width * channels);
  wav.channels.assign(channels, AudioBuffer(frames, static_cast<double>(rate)));
  for (std::size_t f = 0; f < frames; ++f) {
    for (std::size_t c = 0; c < channels; ++c) {
      const unsigned char* p = data + (f * channels + c) * width;
      double v = 0.0;
      switch (wav.format) {
        case SampleFormat::Pcm16:
          v = static_cast<std::int16_t>(le16(p)) / 32768.0;
          break;
        case SampleFormat::Pcm24: {
          std::int32_t s = static_cast<std::int32_t>(p[0] | p[1] << 8 | p[2] << 16);
          if (s & 0x800000) s -= 0x1000000;
          v = s / 8388608.0;
          break;
        }
        case SampleFormat::Float32:
          v = std::bit_cast<float>(le32(p));
          break;
      }
      wav.channels[c].samples[f] = v;
    }
  }
  return wav;
}

void write_wav(const std::filesystem::path& path, const std::vector<AudioBuffer>& channels,
               SampleFormat format) {
  if (channels.empty()) throw InvalidArgument("write_wav: no channels");
  const std::size_t frames = channels.front().size();
  const double fs = channels.front().sample_rate;
  for (const auto& c : channels)
    if (c.size() != frames || c.sample_rate != fs) throw InvalidArgument("write_wav: channel shape mismatch");
  if (!(fs > 0.0) || fs != std::round(fs)) throw InvalidArgument("write_wav: sample rate must be a positive integer");

  const std::uint16_t bits = format == SampleFormat::Pcm16 ? 16 : format == SampleFormat::Pcm24 ? 24 : 32;
  const std::uint16_t tag = format == SampleFormat::Float32 ? kFormatFloat : kFormatPcm;
  const auto nch = static_cast<std::uint16_t>(channels.size());
  const std::uint32_t block_align = nch * (bits / 8);
  const auto data_size = static_cast<std::uint32_t>(frames * block_align);

  std::string out;
  out.reserve(44 + data_size);
  out += "RIFF";
  put32(out, 36 + data_size);
  out += "WAVEfmt ";
  put32(out, 16);
  put16(out, tag);
  put16(out, nch);
  put32(out, static_cast<std::uint32_t>(fs));
  put32(out, static_cast<std::uint32_t>(fs) * block_align);
  put16(out, static_cast<std::uint16_t>(block_align));
  put16(out, bits);
  out += "data";
  put32(out, data_size);

  for (std::size_t f = 0; f < frames; ++f) {
    for (const auto& c : channels) {
      const double v = c.samples[f];
      switch (format) {
        case SampleFormat::Pcm16: {
          const auto s = static_cast<std::int16_t>(std::clamp(std::lround(v * 32768.0), -32768L, 32767L));
          put16(out, static_cast<std::uint16_t>(s));
          break;
        }
        case SampleFormat::Pcm24: {
          const auto s = static_cast<std::int32_t>(std::clamp(std::lround(v * 8388608.0), -8388608L, 8388607L));
          out.push_back(static_cast<char>(s & 0xFF));
          out.push_back(static_cast<char>((s >> 8) & 0xFF));
          out.push_back(static_cast<char>((s >> 16) & 0xFF));
          break;
        }
        case SampleFormat::Float32:
          put32(out, std::bit_cast<std::uint32_t>(static_cast<float>(v)));
          break;
      }
    }
  }

  // Write to a sibling temp file, then rename, so readers never see a partial file.
  const std::filesystem::path tmp = path.string() + ".part";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw IoError("cannot write '" + path.string() + "'");
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
    if (!f) throw IoError("write failed for '" + path.string() + "'");
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("cannot move '" + tmp.string() + "' into place: " + ec.message());
}

AudioBuffer read_mono(const std::filesystem::path& path) {
  WavData wav = read_wav(path);
  if (wav.channels.size() != 1) throw InvalidArgument("'" + path.string() + "' must be mono");
  return std::move(wav.channels.front());
}

}  // namespace accomp

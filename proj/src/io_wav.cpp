#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>

#include "vgan/errors.hpp"
#include "vgan/io.hpp"
#include "vgan/util.hpp"

namespace vgan::io {

namespace {

std::uint32_t rd_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) |
         (static_cast<std::uint32_t>(p[3]) << 24);
}

std::uint16_t rd_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

void wr_u32(std::string& out, std::uint32_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
  out.push_back(static_cast<char>((v >> 16) & 0xff));
  out.push_back(static_cast<char>((v >> 24) & 0xff));
}

void wr_u16(std::string& out, std::uint16_t v) {
  out.push_back(static_cast<char>(v & 0xff));
  out.push_back(static_cast<char>((v >> 8) & 0xff));
}

}  // namespace

AudioBuffer read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(Errc::io, "cannot open WAV file: " + path);
  std::string bytes((std::istreambuf_iterator<char>(in)),
                    std::istreambuf_iterator<char>());
  const auto* p = reinterpret_cast<const unsigned char*>(bytes.data());
  const std::size_t n = bytes.size();

  if (n < 12 || std::memcmp(p, "RIFF", 4) != 0 || std::memcmp(p + 8, "WAVE", 4) != 0)
    fail(Errc::parse, path + ": not a RIFF/WAVE file (RIFF chunk)");

  std::uint16_t channels = 0, bits = 0, format = 0;
  std::uint32_t rate = 0;
  bool have_fmt = false;
  AudioBuffer out;

  std::size_t pos = 12;
  while (pos + 8 <= n) {
    char id[5] = {0};
    std::memcpy(id, p + pos, 4);
    const std::uint32_t size = rd_u32(p + pos + 4);
    const std::size_t body = pos + 8;
    if (body + size > n)
      fail(Errc::parse, path + ": truncated chunk '" + id + "'");

    if (std::memcmp(id, "fmt ", 4) == 0) {
      if (size < 16) fail(Errc::parse, path + ": short 'fmt ' chunk");
      format = rd_u16(p + body);
      channels = rd_u16(p + body + 2);
      rate = rd_u32(p + body + 4);
      bits = rd_u16(p + body + 14);
      if (format != 1)
        fail(Errc::parse, path + ": 'fmt ' declares non-PCM encoding " +
                              std::to_string(format));
      if (bits != 16)
        fail(Errc::parse, path + ": 'fmt ' declares " + std::to_string(bits) +
                              "-bit samples, only PCM16 is supported");
      if (channels == 0) fail(Errc::parse, path + ": 'fmt ' declares zero channels");
      have_fmt = true;
    } else if (std::memcmp(id, "data", 4) == 0) {
      if (!have_fmt) fail(Errc::parse, path + ": 'data' chunk before 'fmt '");
      if (rate < 16000)
        fail(Errc::validation, path + ": sample rate " + std::to_string(rate) +
                                   " below the supported minimum of 16000 Hz");
      const std::size_t frame_bytes = 2u * channels;
      const std::size_t frames = size / frame_bytes;
      out.samples.resize(frames);
      for (std::size_t i = 0; i < frames; ++i) {
        const unsigned char* s = p + body + i * frame_bytes;  // channel 0
        const std::int16_t v = static_cast<std::int16_t>(s[0] | (s[1] << 8));
        out.samples[i] = static_cast<double>(v) / 32768.0;
      }
      out.sample_rate = static_cast<double>(rate);
      return out;
    }
    pos = body + size + (size & 1);  // chunks are word-aligned
  }
  fail(Errc::parse, path + ": missing 'data' chunk");
}

void write_wav(const std::string& path, const AudioBuffer& audio) {
  if (audio.sample_rate <= 0.0)
    fail(Errc::validation, "write_wav: sample rate must be positive");
  std::string out;
  const std::uint32_t data_bytes =
      static_cast<std::uint32_t>(audio.samples.size() * 2);
  out.reserve(44 + data_bytes);
  out += "RIFF";
  wr_u32(out, 36 + data_bytes);
  out += "WAVEfmt ";
  wr_u32(out, 16);
  wr_u16(out, 1);  // PCM
  wr_u16(out, 1);  // mono
  const std::uint32_t rate = static_cast<std::uint32_t>(std::lround(audio.sample_rate));
  wr_u32(out, rate);
  wr_u32(out, rate * 2);
  wr_u16(out, 2);
  wr_u16(out, 16);
  out += "data";
  wr_u32(out, data_bytes);
  for (double x : audio.samples) {
    double v = std::clamp(x, -1.0, 32767.0 / 32768.0);
    const auto q = static_cast<std::int16_t>(std::lround(v * 32768.0));
    out.push_back(static_cast<char>(q & 0xff));
    out.push_back(static_cast<char>((q >> 8) & 0xff));
  }
  write_text_file(path, out);
}

AudioBuffer slice(const AudioBuffer& audio, double start, double end) {
  AudioBuffer out;
  out.sample_rate = audio.sample_rate;
  const auto n = static_cast<long>(audio.samples.size());
  long i0 = static_cast<long>(std::floor(start * audio.sample_rate));
  long i1 = static_cast<long>(std::ceil(end * audio.sample_rate));
  i0 = std::clamp(i0, 0L, n);
  i1 = std::clamp(i1, i0, n);
  out.samples.assign(audio.samples.begin() + i0, audio.samples.begin() + i1);
  return out;
}

}  // namespace vgan::io

#ifndef CSVBSE_WAV_HPP
#define CSVBSE_WAV_HPP

#include <algorithm>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <string>
#include <vector>

#include "csvbse/common.hpp"
#include "csvbse/stft.hpp"

namespace csvbse::wav {

enum class SampleFormat { Pcm16, Float32 };

namespace detail {

inline void put_u32(std::vector<unsigned char>& b, std::uint32_t v) {
  b.push_back(static_cast<unsigned char>(v & 0xff));
  b.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
  b.push_back(static_cast<unsigned char>((v >> 16) & 0xff));
  b.push_back(static_cast<unsigned char>((v >> 24) & 0xff));
}
inline void put_u16(std::vector<unsigned char>& b, std::uint16_t v) {
  b.push_back(static_cast<unsigned char>(v & 0xff));
  b.push_back(static_cast<unsigned char>((v >> 8) & 0xff));
}
inline void put_tag(std::vector<unsigned char>& b, const char* tag) {
  b.insert(b.end(), tag, tag + 4);
}

inline std::uint32_t get_u32(const unsigned char* p) {
  return static_cast<std::uint32_t>(p[0]) | (static_cast<std::uint32_t>(p[1]) << 8) |
         (static_cast<std::uint32_t>(p[2]) << 16) | (static_cast<std::uint32_t>(p[3]) << 24);
}
inline std::uint16_t get_u16(const unsigned char* p) {
  return static_cast<std::uint16_t>(p[0] | (p[1] << 8));
}

}  // namespace detail

inline void write(const std::string& path, const Waveform& x,
                  SampleFormat fmt = SampleFormat::Float32) {
  if (x.length() == 0 || x.channels() == 0)
    fail(ErrorCode::InvalidConfig, "refusing to write empty waveform to " + path);
  if (x.sample_rate <= 0.0) fail(ErrorCode::InvalidConfig, "waveform has no sample rate");

  const auto n = static_cast<std::uint32_t>(x.length());
  const auto ch = static_cast<std::uint16_t>(x.channels());
  const std::uint16_t bytes_per = fmt == SampleFormat::Pcm16 ? 2 : 4;
  const std::uint32_t data_bytes = n * ch * bytes_per;
  const auto rate = static_cast<std::uint32_t>(x.sample_rate + 0.5);

  std::vector<unsigned char> buf;
  buf.reserve(44 + data_bytes);
  detail::put_tag(buf, "RIFF");
  detail::put_u32(buf, 36 + data_bytes);
  detail::put_tag(buf, "WAVE");
  detail::put_tag(buf, "fmt ");
  detail::put_u32(buf, 16);
  detail::put_u16(buf, fmt == SampleFormat::Pcm16 ? 1 : 3);
  detail::put_u16(buf, ch);
  detail::put_u32(buf, rate);
  detail::put_u32(buf, rate * ch * bytes_per);
  detail::put_u16(buf, static_cast<std::uint16_t>(ch * bytes_per));
  detail::put_u16(buf, static_cast<std::uint16_t>(8 * bytes_per));
  detail::put_tag(buf, "data");
  detail::put_u32(buf, data_bytes);

  for (std::uint32_t s = 0; s < n; ++s) {
    for (std::uint16_t c = 0; c < ch; ++c) {
      const double v = x.samples(s, c);
      if (fmt == SampleFormat::Pcm16) {
        const double clipped = std::clamp(v, -1.0, 1.0);
        auto q = static_cast<std::int32_t>(std::lrint(clipped * 32767.0));
        q = std::clamp(q, -32768, 32767);
        detail::put_u16(buf, static_cast<std::uint16_t>(static_cast<std::int16_t>(q)));
      } else {
        const auto f = static_cast<float>(v);
        std::uint32_t bits;
        std::memcpy(&bits, &f, 4);
        detail::put_u32(buf, bits);
      }
    }
  }

  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoFailure, "cannot open " + path + " for writing");
  out.write(reinterpret_cast<const char*>(buf.data()), static_cast<std::streamsize>(buf.size()));
  if (!out) fail(ErrorCode::IoFailure, "short write to " + path);
}

inline Waveform read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoFailure, "cannot open " + path);
  std::vector<unsigned char> buf((std::istreambuf_iterator<char>(in)),
                                 std::istreambuf_iterator<char>());
  if (buf.size() < 44 || std::memcmp(buf.data(), "RIFF", 4) != 0 ||
      std::memcmp(buf.data() + 8, "WAVE", 4) != 0)
    fail(ErrorCode::IoFailure, path + " is not a RIFF/WAVE file");

  std::uint16_t format = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_off = 0, data_len = 0;
  std::size_t pos = 12;
  while (pos + 8 <= buf.size()) {
    const std::uint32_t chunk_len = detail::get_u32(buf.data() + pos + 4);
    const unsigned char* body = buf.data() + pos + 8;
    if (pos + 8 + chunk_len > buf.size())
      fail(ErrorCode::IoFailure, path + " has a truncated chunk");
    if (std::memcmp(buf.data() + pos, "fmt ", 4) == 0) {
      if (chunk_len < 16) fail(ErrorCode::IoFailure, path + " has a malformed fmt chunk");
      format = detail::get_u16(body);
      channels = detail::get_u16(body + 2);
      rate = detail::get_u32(body + 4);
      bits = detail::get_u16(body + 14);
    } else if (std::memcmp(buf.data() + pos, "data", 4) == 0) {
      data_off = pos + 8;
      data_len = chunk_len;
    }
    pos += 8 + chunk_len + (chunk_len & 1);  // chunks are word-aligned
  }
  if (channels == 0 || rate == 0 || data_len == 0)
    fail(ErrorCode::IoFailure, path + " is missing fmt or data");

  const bool pcm16 = format == 1 && bits == 16;
  const bool f32 = format == 3 && bits == 32;
  if (!pcm16 && !f32)
    fail(ErrorCode::IoFailure,
         path + ": unsupported format (only 16-bit PCM and 32-bit float are handled)");

  const std::size_t bytes_per = pcm16 ? 2 : 4;
  const std::size_t n_samples = data_len / (bytes_per * channels);
  Waveform x;
  x.sample_rate = static_cast<double>(rate);
  x.samples.resize(static_cast<Eigen::Index>(n_samples), channels);
  const unsigned char* p = buf.data() + data_off;
  for (std::size_t s = 0; s < n_samples; ++s) {
    for (std::uint16_t c = 0; c < channels; ++c) {
      if (pcm16) {
        const auto q = static_cast<std::int16_t>(detail::get_u16(p));
        x.samples(static_cast<Eigen::Index>(s), c) = static_cast<double>(q) / 32768.0;
        p += 2;
      } else {
        const std::uint32_t b = detail::get_u32(p);
        float f;
        std::memcpy(&f, &b, 4);
        x.samples(static_cast<Eigen::Index>(s), c) = static_cast<double>(f);
        p += 4;
      }
    }
  }
  return x;
}

}  // namespace csvbse::wav

#endif  // CSVBSE_WAV_HPP

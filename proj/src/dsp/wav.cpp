// vmbeam/dsp/wav.cpp
//
// Copyright 2026 vmbeam authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//  http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "vmbeam/dsp/wav.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <fstream>

namespace vmbeam::dsp {

namespace {

constexpr std::uint16_t kFormatPcm = 1;
constexpr std::uint16_t kFormatFloat = 3;
constexpr std::uint32_t kRequiredRate = 16000;

template <typename T>
void put(std::string& buf, T v) {
  const char* p = reinterpret_cast<const char*>(&v);
  buf.append(p, sizeof(T));
}

template <typename T>
T get(const std::string& buf, std::size_t off) {
  T v;
  std::memcpy(&v, buf.data() + off, sizeof(T));
  return v;
}

}  // namespace

void write_wav(const std::string& path, const MultiWave& wave,
               WavFormat format) {
  require(wave.num_channels() >= 1 && wave.num_samples() >= 1, ErrorKind::data,
          "write_wav: empty waveform");
  require(static_cast<std::uint32_t>(wave.sample_rate) == kRequiredRate,
          ErrorKind::data, "write_wav: only 16 kHz is supported");
  for (const auto& ch : wave.channels) {
    require(static_cast<std::int64_t>(ch.size()) == wave.num_samples(),
            ErrorKind::data, "write_wav: ragged channels");
  }

  const std::uint16_t channels = static_cast<std::uint16_t>(wave.num_channels());
  const std::uint16_t bits = format == WavFormat::pcm16 ? 16
                             : format == WavFormat::float32 ? 32
                                                            : 64;
  const std::uint16_t fmt = format == WavFormat::pcm16 ? kFormatPcm : kFormatFloat;
  const std::uint32_t bytes_per_sample = bits / 8;
  const std::uint32_t block_align = channels * bytes_per_sample;
  const std::uint32_t data_size =
      static_cast<std::uint32_t>(wave.num_samples()) * block_align;

  std::string buf;
  buf.reserve(44 + data_size);
  buf.append("RIFF");
  put<std::uint32_t>(buf, 36 + data_size);
  buf.append("WAVE");
  buf.append("fmt ");
  put<std::uint32_t>(buf, 16);
  put<std::uint16_t>(buf, fmt);
  put<std::uint16_t>(buf, channels);
  put<std::uint32_t>(buf, kRequiredRate);
  put<std::uint32_t>(buf, kRequiredRate * block_align);
  put<std::uint16_t>(buf, static_cast<std::uint16_t>(block_align));
  put<std::uint16_t>(buf, bits);
  buf.append("data");
  put<std::uint32_t>(buf, data_size);

  const std::int64_t n = wave.num_samples();
  for (std::int64_t i = 0; i < n; ++i) {
    for (int c = 0; c < channels; ++c) {
      const double v = wave.channels[c][i];
      switch (format) {
        case WavFormat::pcm16: {
          const double scaled = std::round(v * 32768.0);
          const double clamped = std::clamp(scaled, -32768.0, 32767.0);
          put<std::int16_t>(buf, static_cast<std::int16_t>(clamped));
          break;
        }
        case WavFormat::float32:
          put<float>(buf, static_cast<float>(v));
          break;
        case WavFormat::float64:
          put<double>(buf, v);
          break;
      }
    }
  }

  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  require(out.good(), ErrorKind::data, "cannot open for write: " + path);
  out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  require(out.good(), ErrorKind::data, "write failed: " + path);
}

MultiWave read_wav(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  require(in.good(), ErrorKind::data, "cannot open wav: " + path);
  std::string buf((std::istreambuf_iterator<char>(in)),
                  std::istreambuf_iterator<char>());
  require(buf.size() >= 44 && buf.compare(0, 4, "RIFF") == 0 &&
              buf.compare(8, 4, "WAVE") == 0,
          ErrorKind::data, "not a RIFF/WAVE file: " + path);

  // Walk chunks; tolerate extras (LIST, fact, ...).
  std::size_t off = 12;
  std::uint16_t fmt = 0, channels = 0, bits = 0;
  std::uint32_t rate = 0;
  std::size_t data_off = 0, data_size = 0;
  while (off + 8 <= buf.size()) {
    const std::string id = buf.substr(off, 4);
    const std::uint32_t size = get<std::uint32_t>(buf, off + 4);
    const std::size_t body = off + 8;
    if (id == "fmt ") {
      require(size >= 16 && body + 16 <= buf.size(), ErrorKind::data,
              "bad fmt chunk: " + path);
      fmt = get<std::uint16_t>(buf, body);
      channels = get<std::uint16_t>(buf, body + 2);
      rate = get<std::uint32_t>(buf, body + 4);
      bits = get<std::uint16_t>(buf, body + 14);
    } else if (id == "data") {
      data_off = body;
      data_size = size;
    }
    off = body + size + (size % 2);  // chunks are word-aligned
  }
  require(channels >= 1 && data_off != 0, ErrorKind::data,
          "missing fmt/data chunk: " + path);
  require(rate == kRequiredRate, ErrorKind::data,
          "unsupported sample rate (need 16000): " + path);
  require(data_off + data_size <= buf.size(), ErrorKind::data,
          "truncated data chunk: " + path);

  const std::uint32_t bytes_per_sample = bits / 8;
  require(bytes_per_sample > 0, ErrorKind::data, "bad bit depth: " + path);
  const std::size_t total = data_size / (bytes_per_sample * channels);

  MultiWave wave;
  wave.sample_rate = kRequiredRate;
  wave.channels.assign(channels, std::vector<double>(total));
  std::size_t p = data_off;
  for (std::size_t i = 0; i < total; ++i) {
    for (int c = 0; c < channels; ++c) {
      double v = 0.0;
      if (fmt == kFormatPcm && bits == 16) {
        v = get<std::int16_t>(buf, p) / 32768.0;
      } else if (fmt == kFormatFloat && bits == 32) {
        v = get<float>(buf, p);
      } else if (fmt == kFormatFloat && bits == 64) {
        v = get<double>(buf, p);
      } else {
        throw Error(ErrorKind::data,
                    "unsupported wav encoding (want pcm16/float32/float64): " +
                        path);
      }
      wave.channels[c][i] = v;
      p += bytes_per_sample;
    }
  }
  return wave;
}

}  // namespace vmbeam::dsp

// Copyright 2026 The rxvc Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//   http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "rxvc/audio.h"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numbers>

#include "rxvc/binary_io.h"
#include "rxvc/errors.h"

namespace rxvc {

Waveform ReadWav(const std::string& path) {
  std::string bytes;
  try {
    bytes = bin::ReadFile(path);
  } catch (const InvalidInput&) {
    throw InvalidInput("cannot open audio file " + path);
  }
  bin::Reader r(bytes, path);
  try {
    if (r.GetBytes(4) != "RIFF") throw InvalidInput(path + ": not a RIFF file");
    r.Get<uint32_t>();
    if (r.GetBytes(4) != "WAVE") throw InvalidInput(path + ": not a WAVE file");
    uint16_t format = 0, channels = 0, bits = 0;
    uint32_t rate = 0;
    bool have_fmt = false;
    while (r.remaining() >= 8) {
      const std::string id(r.GetBytes(4));
      const uint32_t size = r.Get<uint32_t>();
      if (id == "fmt ") {
        bin::Reader fmt(r.GetBytes(size), path);
        format = fmt.Get<uint16_t>();
        channels = fmt.Get<uint16_t>();
        rate = fmt.Get<uint32_t>();
        fmt.Get<uint32_t>();
        fmt.Get<uint16_t>();
        bits = fmt.Get<uint16_t>();
        have_fmt = true;
      } else if (id == "data") {
        if (!have_fmt) throw InvalidInput(path + ": data chunk before fmt");
        // WAVE_FORMAT_EXTENSIBLE (0xFFFE) carries PCM in its subformat.
        if ((format != 1 && format != 0xFFFE) || bits != 16 || channels == 0)
          throw InvalidInput(path + ": only 16-bit PCM WAV is supported");
        const size_t avail = std::min<size_t>(size, r.remaining());
        std::string_view data = r.GetBytes(avail);
        const size_t frames = data.size() / (2 * channels);
        Waveform wav;
        wav.sample_rate = static_cast<int>(rate);
        wav.samples.resize(frames);
        for (size_t i = 0; i < frames; ++i) {
          double acc = 0.0;
          for (int c = 0; c < channels; ++c) {
            int16_t s;
            std::memcpy(&s, data.data() + 2 * (i * channels + c), 2);
            acc += s / 32768.0;
          }
          wav.samples[i] = acc / channels;
        }
        if (wav.samples.empty()) throw InvalidInput(path + ": empty audio");
        return wav;
      } else {
        r.GetBytes(std::min<size_t>(size + (size & 1), r.remaining()));
      }
    }
  } catch (const ParseError&) {
    throw InvalidInput(path + ": truncated WAV file");
  }
  throw InvalidInput(path + ": no data chunk");
}

void WriteWav(const std::string& path, const Waveform& wav) {
  bin::Writer w;
  const uint32_t data_bytes = static_cast<uint32_t>(wav.samples.size() * 2);
  w.PutBytes("RIFF");
  w.Put<uint32_t>(36 + data_bytes);
  w.PutBytes("WAVE");
  w.PutBytes("fmt ");
  w.Put<uint32_t>(16);
  w.Put<uint16_t>(1);
  w.Put<uint16_t>(1);
  w.Put<uint32_t>(static_cast<uint32_t>(wav.sample_rate));
  w.Put<uint32_t>(static_cast<uint32_t>(wav.sample_rate) * 2);
  w.Put<uint16_t>(2);
  w.Put<uint16_t>(16);
  w.PutBytes("data");
  w.Put<uint32_t>(data_bytes);
  for (double s : wav.samples) {
    const double c = std::clamp(s, -1.0, 1.0);
    w.Put<int16_t>(static_cast<int16_t>(std::lround(c * 32767.0)));
  }
  bin::WriteFile(path, w.data());
}

Waveform Resample(const Waveform& wav, int target_rate) {
  if (target_rate <= 0 || wav.sample_rate <= 0)
    throw InvalidInput("resample: sample rates must be positive");
  if (target_rate == wav.sample_rate) return wav;
  constexpr int kZeros = 16;
  const double ratio = static_cast<double>(target_rate) / wav.sample_rate;
  const double cutoff = std::min(1.0, ratio);  // relative to input Nyquist
  const double half_width = kZeros / cutoff;   // in input samples
  const auto n_in = static_cast<int64_t>(wav.samples.size());
  const auto n_out = static_cast<int64_t>(std::floor(n_in * ratio));
  Waveform out;
  out.sample_rate = target_rate;
  out.samples.resize(static_cast<size_t>(n_out));
  for (int64_t i = 0; i < n_out; ++i) {
    const double center = i / ratio;
    const auto lo = static_cast<int64_t>(std::ceil(center - half_width));
    const auto hi = static_cast<int64_t>(std::floor(center + half_width));
    double acc = 0.0;
    for (int64_t j = std::max<int64_t>(lo, 0); j <= std::min(hi, n_in - 1);
         ++j) {
      const double x = j - center;
      const double arg = std::numbers::pi * cutoff * x;
      const double sinc = std::abs(arg) < 1e-12 ? 1.0 : std::sin(arg) / arg;
      const double window =
          0.5 + 0.5 * std::cos(std::numbers::pi * x / half_width);
      acc += wav.samples[static_cast<size_t>(j)] * cutoff * sinc * window;
    }
    out.samples[static_cast<size_t>(i)] = acc;
  }
  return out;
}

}  // namespace rxvc

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

#ifndef RXVC_AUDIO_H_
#define RXVC_AUDIO_H_

#include <string>
#include <vector>

namespace rxvc {

struct Waveform {
  std::vector<double> samples;  // mono, nominally in [-1, 1]
  int sample_rate = 16000;
};

// Reads a 16-bit PCM RIFF/WAVE file. Multi-channel audio is averaged to mono.
// Throws InvalidInput when the file is missing, not PCM16, or empty.
Waveform ReadWav(const std::string& path);

// Writes 16-bit PCM mono; samples are clipped to [-1, 1]. Throws WriteError.
void WriteWav(const std::string& path, const Waveform& wav);

// Band-limited resampling (Hann-windowed sinc, 16 zero crossings). Returns
// the input unchanged when the rates already match.
Waveform Resample(const Waveform& wav, int target_rate);

}  // namespace rxvc

#endif  // RXVC_AUDIO_H_

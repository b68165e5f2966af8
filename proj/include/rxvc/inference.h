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

#ifndef RXVC_INFERENCE_H_
#define RXVC_INFERENCE_H_

#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rxvc/audio.h"
#include "rxvc/checkpoint.h"
#include "rxvc/corpus.h"
#include "rxvc/features.h"
#include "rxvc/timbre_encoder.h"

namespace rxvc {

// Mel in, waveform out. Implementations must be safe to call concurrently.
class Vocoder {
 public:
  virtual ~Vocoder() = default;
  virtual Waveform Synthesize(const MelSpectrogram& mel) const = 0;
};

// Pseudo-inverse of the mel filterbank followed by Griffin-Lim phase
// reconstruction from zero phase. Output has (T - 1) * hop samples, clipped
// to [-1, 1].
class GriffinLimVocoder : public Vocoder {
 public:
  explicit GriffinLimVocoder(int n_iters, const FeatureConfig& cfg = {});
  Waveform Synthesize(const MelSpectrogram& mel) const override;

 private:
  int n_iters_;
  FeatureConfig cfg_;
  ag::RowMatrix inverse_;  // [num_bins x num_mels]
};

Waveform MelToWaveform(const MelSpectrogram& mel, int n_iters,
                       const FeatureConfig& cfg = {});

struct ConversionRequest {
  std::string source_audio_path;
  std::vector<std::string> reference_audio_paths;
  std::string checkpoint_path;
  std::string output_path;
  int n_griffin_lim_iters = 60;
  std::string mel_dump_path;        // optional, feature-cache format
  std::string attention_dump_path;  // optional, alignment dump format
};

struct ConversionResult {
  MelSpectrogram mel_hat;
  Waveform waveform;
  ag::RowMatrix attention;  // [T_s x T_bank]
  std::vector<int> boundaries;
};

// A loaded, immutable model. Const methods may run concurrently.
class Converter {
 public:
  explicit Converter(Checkpoint ckpt);
  static Converter Load(const std::string& checkpoint_path);

  // Converted mel for a source and its reference utterances (features at
  // the checkpoint's front-end settings). The waveform is left empty.
  ConversionResult ConvertFeatures(
      const MelSpectrogram& source_mel, const NormalizedPitch& source_pitch,
      std::span<const MelSpectrogram> reference_mels) const;

  // Full pipeline from audio, including the vocoder.
  ConversionResult Convert(const Waveform& source,
                           std::span<const Waveform> references,
                           const Vocoder& vocoder) const;

  SpeakerEmbedding EncodeSpeaker(const MelSpectrogram& mel) const;

  const Checkpoint& checkpoint() const { return ckpt_; }

 private:
  Checkpoint ckpt_;
};

// Loads the checkpoint, converts, writes the output WAV and any requested
// dumps.
ConversionResult Convert(const ConversionRequest& req);

}  // namespace rxvc

#endif  // RXVC_INFERENCE_H_

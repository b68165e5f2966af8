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

#ifndef RXVC_TIMBRE_ENCODER_H_
#define RXVC_TIMBRE_ENCODER_H_

#include <vector>

#include "rxvc/features.h"
#include "rxvc/layers.h"
#include "rxvc/model_config.h"

namespace rxvc {

struct SpeakerEmbedding {
  ag::Var global;  // S_G, [1 x embed_dim]
  ag::Var local;   // S_L, [T x embed_dim]
};

// Stacked bidirectional LSTM over the reference mel. The frame-level
// embedding is the last layer's forward||backward state projected to
// embed_dim; the utterance-level embedding is its mean over time.
class TimbreEncoder {
 public:
  TimbreEncoder() = default;
  TimbreEncoder(const ModelConfig& cfg, Rng& rng);

  SpeakerEmbedding Encode(const ag::Var& mel) const;
  SpeakerEmbedding Encode(const MelSpectrogram& mel) const;

  void Collect(const std::string& prefix, nn::ParamList& out) const;

  int num_layers() const { return static_cast<int>(layers_.size()); }
  int embed_dim() const { return embed_dim_; }

 private:
  int mel_dim_ = 0;
  int embed_dim_ = 0;
  std::vector<nn::BiLstmLayer> layers_;
  nn::Linear proj_;
};

}  // namespace rxvc

#endif  // RXVC_TIMBRE_ENCODER_H_

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

#include "rxvc/timbre_encoder.h"

#include "rxvc/errors.h"

namespace rxvc {

TimbreEncoder::TimbreEncoder(const ModelConfig& cfg, Rng& rng)
    : mel_dim_(cfg.mel_dim), embed_dim_(cfg.embed_dim) {
  int in = cfg.mel_dim;
  for (int i = 0; i < cfg.timbre_layers; ++i) {
    layers_.emplace_back(in, cfg.timbre_hidden, rng);
    in = 2 * cfg.timbre_hidden;
  }
  proj_ = nn::Linear(in, cfg.embed_dim, rng);
}

SpeakerEmbedding TimbreEncoder::Encode(const ag::Var& mel) const {
  if (mel.rows() == 0) throw InvalidInput("encode_timbre: empty mel");
  if (mel.cols() != mel_dim_)
    throw InvalidInput("encode_timbre: expected " + std::to_string(mel_dim_) +
                       " mel bins");
  ag::Var h = mel;
  for (const auto& layer : layers_) h = layer.Forward(h);
  SpeakerEmbedding out;
  out.local = proj_.Forward(h);
  out.global = ag::MeanRows(out.local);
  return out;
}

SpeakerEmbedding TimbreEncoder::Encode(const MelSpectrogram& mel) const {
  if (mel.num_frames() == 0) throw InvalidInput("encode_timbre: empty mel");
  return Encode(ag::Var::FromMatrix(mel.frames));
}

void TimbreEncoder::Collect(const std::string& prefix,
                            nn::ParamList& out) const {
  for (size_t i = 0; i < layers_.size(); ++i)
    layers_[i].Collect(prefix + ".lstm." + std::to_string(i), out);
  proj_.Collect(prefix + ".proj", out);
}

}  // namespace rxvc

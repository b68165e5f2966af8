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

#ifndef RXVC_CONTENT_ENCODER_H_
#define RXVC_CONTENT_ENCODER_H_

#include <vector>

#include "rxvc/features.h"
#include "rxvc/layers.h"
#include "rxvc/model_config.h"

namespace rxvc {

// Self-attention with learned relative-position key biases: the logit for
// query i and key j gains q_i . r[clip(p_j - p_i)], offsets clipped to
// +/- max_rel_offset.
struct RelativeSelfAttention {
  RelativeSelfAttention() = default;
  RelativeSelfAttention(int hidden, int heads, int max_rel, Rng& rng);

  // origin shifts every position index; only differences matter.
  ag::Var Forward(const ag::Var& x, int origin,
                  std::vector<ag::Var>* attention) const;
  void Collect(const std::string& prefix, nn::ParamList& out) const;

  int heads = 1, head_dim = 0, max_rel = 0;
  nn::Linear query, key, value, output;
  std::vector<ag::Var> rel_keys;  // per head [2*max_rel+1 x head_dim]
};

// Post-norm feed-forward Transformer block.
struct EncoderLayer {
  EncoderLayer() = default;
  EncoderLayer(const ModelConfig& cfg, Rng& rng);
  ag::Var Forward(const ag::Var& x, int origin,
                  std::vector<ag::Var>* attention) const;
  void Collect(const std::string& prefix, nn::ParamList& out) const;

  RelativeSelfAttention attn;
  nn::LayerNorm norm1, norm2;
  nn::Linear ffn_in, ffn_out;
};

class ContentEncoder {
 public:
  ContentEncoder() = default;
  ContentEncoder(const ModelConfig& cfg, Rng& rng);

  // Hidden content representation [T x hidden]. Throws RangeError for tokens
  // outside the vocabulary. When attention is non-null it receives every
  // layer's per-head weights, layer-major.
  ag::Var Encode(const TokenSequence& tokens, int position_origin = 0,
                 std::vector<ag::Var>* attention = nullptr) const;

  void Collect(const std::string& prefix, nn::ParamList& out) const;

  int vocab_size() const { return embedding_.rows(); }
  const ag::Var& embedding() const { return embedding_; }
  const std::vector<EncoderLayer>& layers() const { return layers_; }

 private:
  ag::Var embedding_;  // [K x hidden]
  std::vector<EncoderLayer> layers_;
};

}  // namespace rxvc

#endif  // RXVC_CONTENT_ENCODER_H_

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

#include "rxvc/content_encoder.h"

#include <algorithm>
#include <cmath>
#include <memory>

#include "rxvc/errors.h"

namespace rxvc {

using ag::Var;

RelativeSelfAttention::RelativeSelfAttention(int hidden, int num_heads,
                                             int max_rel_offset, Rng& rng)
    : heads(num_heads),
      head_dim(hidden / num_heads),
      max_rel(max_rel_offset),
      query(hidden, hidden, rng),
      key(hidden, hidden, rng),
      value(hidden, hidden, rng),
      output(hidden, hidden, rng) {
  for (int h = 0; h < heads; ++h)
    rel_keys.push_back(nn::UniformParam(2 * max_rel + 1, head_dim, head_dim, rng));
}

Var RelativeSelfAttention::Forward(const Var& x, int origin,
                                   std::vector<Var>* attention) const {
  const int steps = x.rows();
  const int span = 2 * max_rel + 1;
  // (i, j) -> row i of the per-offset logits, column clip(p_j - p_i) + R
  auto index = std::make_shared<std::vector<int>>(size_t(steps) * steps);
  for (int i = 0; i < steps; ++i) {
    const long pi = static_cast<long>(origin) + i;
    for (int j = 0; j < steps; ++j) {
      const long pj = static_cast<long>(origin) + j;
      const long off = std::clamp<long>(pj - pi, -max_rel, max_rel);
      (*index)[size_t(i) * steps + j] = i * span + static_cast<int>(off + max_rel);
    }
  }
  const Var q = query.Forward(x), k = key.Forward(x), v = value.Forward(x);
  const double scale = 1.0 / std::sqrt(static_cast<double>(head_dim));
  std::vector<Var> outs;
  for (int h = 0; h < heads; ++h) {
    const Var qh = ag::SliceCols(q, h * head_dim, head_dim);
    const Var kh = ag::SliceCols(k, h * head_dim, head_dim);
    const Var vh = ag::SliceCols(v, h * head_dim, head_dim);
    const Var rel = ag::IndexGather(ag::MatMulNT(qh, rel_keys[h]), steps,
                                    steps, index);
    const Var w = ag::SoftmaxRows(ag::Scale(ag::Add(ag::MatMulNT(qh, kh), rel),
                                            scale));
    if (attention) attention->push_back(w);
    outs.push_back(ag::MatMul(w, vh));
  }
  return output.Forward(ag::ConcatCols(outs));
}

void RelativeSelfAttention::Collect(const std::string& prefix,
                                    nn::ParamList& out) const {
  query.Collect(prefix + ".query", out);
  key.Collect(prefix + ".key", out);
  value.Collect(prefix + ".value", out);
  output.Collect(prefix + ".output", out);
  for (int h = 0; h < heads; ++h)
    out.push_back({prefix + ".rel_key." + std::to_string(h), rel_keys[h]});
}

EncoderLayer::EncoderLayer(const ModelConfig& cfg, Rng& rng)
    : attn(cfg.hidden, cfg.content_heads, cfg.max_rel_offset, rng),
      norm1(cfg.hidden),
      norm2(cfg.hidden),
      ffn_in(cfg.hidden, cfg.content_ffn, rng),
      ffn_out(cfg.content_ffn, cfg.hidden, rng) {}

Var EncoderLayer::Forward(const Var& x, int origin,
                          std::vector<Var>* attention) const {
  const Var a = norm1.Forward(ag::Add(x, attn.Forward(x, origin, attention)));
  const Var f = ffn_out.Forward(ag::Relu(ffn_in.Forward(a)));
  return norm2.Forward(ag::Add(a, f));
}

void EncoderLayer::Collect(const std::string& prefix,
                           nn::ParamList& out) const {
  attn.Collect(prefix + ".attn", out);
  norm1.Collect(prefix + ".norm1", out);
  norm2.Collect(prefix + ".norm2", out);
  ffn_in.Collect(prefix + ".ffn_in", out);
  ffn_out.Collect(prefix + ".ffn_out", out);
}

ContentEncoder::ContentEncoder(const ModelConfig& cfg, Rng& rng)
    : embedding_(nn::UniformParam(cfg.vocab_size, cfg.hidden, 1, rng)) {
  for (int i = 0; i < cfg.content_layers; ++i) layers_.emplace_back(cfg, rng);
}

Var ContentEncoder::Encode(const TokenSequence& tokens, int position_origin,
                           std::vector<Var>* attention) const {
  if (tokens.tokens.empty())
    throw InvalidInput("encode_content: empty token sequence");
  for (int t : tokens.tokens)
    if (t < 0 || t >= vocab_size())
      throw RangeError("encode_content: token " + std::to_string(t) +
                       " outside vocabulary of " +
                       std::to_string(vocab_size()));
  Var h = ag::GatherRows(embedding_, tokens.tokens);
  for (const auto& layer : layers_)
    h = layer.Forward(h, position_origin, attention);
  return h;
}

void ContentEncoder::Collect(const std::string& prefix,
                             nn::ParamList& out) const {
  out.push_back({prefix + ".embedding", embedding_});
  for (size_t i = 0; i < layers_.size(); ++i)
    layers_[i].Collect(prefix + ".layer." + std::to_string(i), out);
}

}  // namespace rxvc

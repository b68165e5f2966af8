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

#ifndef RXVC_PMN_H_
#define RXVC_PMN_H_

#include <span>
#include <string>
#include <vector>

#include "rxvc/layers.h"
#include "rxvc/model_config.h"

namespace rxvc {

// Reference content hiddens and local speaker embeddings stacked along time.
struct ReferenceBank {
  ag::Var h_r;  // [T_bank x hidden]
  ag::Var s_l;  // [T_bank x embed_dim]
  std::vector<int> boundaries;  // start row of each reference

  int size() const { return h_r.rows(); }
};

struct ReferenceEncoding {
  ag::Var content;  // H_R of one reference
  ag::Var local;    // S_L of the same reference
};

// Concatenates in list order. Throws InvalidInput on an empty list or when a
// reference's content and embedding lengths differ.
ReferenceBank BuildReferenceBank(std::span<const ReferenceEncoding> refs);

struct FineGrainedTimbre {
  ag::Var f;     // [T_s x embed_dim]
  ag::Var attn;  // [T_s x T_bank], rows sum to 1
};

// Single-head cross-attention: queries from the source content, keys from
// the reference content, values are the reference S_L rows unchanged.
class PronunciationMatcher {
 public:
  PronunciationMatcher() = default;
  PronunciationMatcher(const ModelConfig& cfg, Rng& rng);
  PronunciationMatcher(ag::Var w_query, ag::Var w_key);

  FineGrainedTimbre Match(const ag::Var& h_s, const ReferenceBank& bank) const;

  void Collect(const std::string& prefix, nn::ParamList& out) const;

  const ag::Var& w_query() const { return w_query_; }
  const ag::Var& w_key() const { return w_key_; }

 private:
  ag::Var w_query_;  // [hidden x hidden]
  ag::Var w_key_;    // [hidden x hidden]
};

// fused[t] = f[t] + s_g
ag::Var FuseSpeaker(const ag::Var& f, const ag::Var& s_g);

struct AlignmentDump {
  int source_frames = 0;
  int bank_frames = 0;
  std::vector<int> boundaries;
  ag::RowMatrix weights;  // [source_frames x bank_frames]

  // Mean over source frames of the attention mass inside reference block b.
  double BlockMass(int b) const;
};

// Text format: "RXVCATT1 <T_s> <T_bank> <n_refs> <boundaries...>" then T_s
// lines of T_bank weights with 6 significant digits. Throws WriteError.
void ExportAttention(const std::string& path, const ag::RowMatrix& attn,
                     std::span<const int> boundaries);
// Throws ParseError on malformed input.
AlignmentDump ReadAlignmentDump(const std::string& path);

}  // namespace rxvc

#endif  // RXVC_PMN_H_

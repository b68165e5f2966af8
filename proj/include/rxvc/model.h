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

#ifndef RXVC_MODEL_H_
#define RXVC_MODEL_H_

#include <cstdint>
#include <span>
#include <vector>

#include "rxvc/content_encoder.h"
#include "rxvc/features.h"
#include "rxvc/model_config.h"
#include "rxvc/pmn.h"
#include "rxvc/synthesis.h"
#include "rxvc/timbre_encoder.h"

namespace rxvc {

// A reference utterance as the generator consumes it.
struct ReferenceInput {
  const MelSpectrogram* mel = nullptr;
  const TokenSequence* tokens = nullptr;
};

struct GeneratorOutput {
  ag::Var mel;                      // [T_s x mel_dim]
  ag::Var attention;                // [T_s x T_bank]
  std::vector<int> boundaries;      // reference starts in the bank
  std::vector<ag::Var> ref_global;  // S_G per reference
  ag::Var speaker;                  // mean of ref_global
};

// Everything trained by the reconstruction objective.
struct Generator {
  Generator() = default;
  Generator(const ModelConfig& cfg, Rng& rng);

  // tokens -> H_S; per reference: mel -> timbre, tokens -> H_R; bank ->
  // cross-attention -> fuse with the mean reference S_G -> decode.
  GeneratorOutput Forward(const TokenSequence& source_tokens,
                          const NormalizedPitch& source_pitch,
                          std::span<const ReferenceInput> refs) const;

  void Collect(nn::ParamList& out) const;

  TimbreEncoder timbre;
  ContentEncoder content;
  PronunciationMatcher pmn;
  Decoder decoder;
};

struct Model {
  Model() = default;
  Model(const ModelConfig& cfg, uint64_t seed);

  nn::ParamList GeneratorParams() const;
  nn::ParamList DiscriminatorParams() const;

  ModelConfig config;
  Generator generator;
  Discriminator discriminator;
};

}  // namespace rxvc

#endif  // RXVC_MODEL_H_

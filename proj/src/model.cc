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

#include "rxvc/model.h"

#include "rxvc/errors.h"

namespace rxvc {

Generator::Generator(const ModelConfig& cfg, Rng& rng)
    : timbre(cfg, rng), content(cfg, rng), pmn(cfg, rng), decoder(cfg, rng) {}

GeneratorOutput Generator::Forward(const TokenSequence& source_tokens,
                                   const NormalizedPitch& source_pitch,
                                   std::span<const ReferenceInput> refs) const {
  if (refs.empty()) throw InvalidInput("generator: at least one reference");
  const ag::Var h_s = content.Encode(source_tokens);
  GeneratorOutput out;
  std::vector<ReferenceEncoding> encoded;
  for (const auto& ref : refs) {
    if (!ref.mel || !ref.tokens || ref.mel->num_frames() == 0)
      throw InvalidInput("generator: zero-length reference");
    CheckFrameAlignment(*ref.tokens, *ref.mel, "reference");
    SpeakerEmbedding emb = timbre.Encode(*ref.mel);
    encoded.push_back({content.Encode(*ref.tokens), emb.local});
    out.ref_global.push_back(emb.global);
  }
  const ReferenceBank bank = BuildReferenceBank(encoded);
  const FineGrainedTimbre fine = pmn.Match(h_s, bank);
  out.speaker = out.ref_global.size() == 1
                    ? out.ref_global[0]
                    : ag::MeanRows(ag::ConcatRows(out.ref_global));
  out.mel = decoder.Decode(h_s, FuseSpeaker(fine.f, out.speaker), source_pitch);
  out.attention = fine.attn;
  out.boundaries = bank.boundaries;
  return out;
}

void Generator::Collect(nn::ParamList& out) const {
  timbre.Collect("timbre", out);
  content.Collect("content", out);
  pmn.Collect("pmn", out);
  decoder.Collect("decoder", out);
}

Model::Model(const ModelConfig& cfg, uint64_t seed) : config(cfg) {
  cfg.Validate();
  Rng gen_rng = StreamRng(seed, 0x67656e);
  Rng disc_rng = StreamRng(seed, 0x646973);
  generator = Generator(cfg, gen_rng);
  discriminator = Discriminator(cfg, disc_rng);
}

nn::ParamList Model::GeneratorParams() const {
  nn::ParamList out;
  generator.Collect(out);
  return out;
}

nn::ParamList Model::DiscriminatorParams() const {
  nn::ParamList out;
  discriminator.Collect("disc", out);
  return out;
}

}  // namespace rxvc

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

#ifndef RXVC_SYNTHESIS_H_
#define RXVC_SYNTHESIS_H_

#include <optional>
#include <span>
#include <vector>

#include "rxvc/features.h"
#include "rxvc/layers.h"
#include "rxvc/model_config.h"

namespace rxvc {

// Per-frame [value, voiced] pitch input, [T x 2].
ag::Var PitchInput(const NormalizedPitch& pitch);

// Posterior encoder + speech decoder. The conditioning [h_s; fused; pitch]
// is projected to hidden, zero-padded to a multiple of the stride, pooled
// by a stride-S convolution, run through two WaveNet stacks, upsampled by a
// stride-S transposed convolution, and projected to mel. Kernel = stride
// for both resampling convolutions, so they act on disjoint frame blocks.
class Decoder {
 public:
  Decoder() = default;
  Decoder(const ModelConfig& cfg, Rng& rng);

  // Returns [T_s x mel_dim]. Throws InvalidInput on length mismatches.
  ag::Var Decode(const ag::Var& h_s, const ag::Var& fused,
                 const NormalizedPitch& pitch) const;

  int LatentLength(int frames) const;
  // Output frames that input frame t can influence lie within
  // [t - HalfReceptiveFrames(), t + HalfReceptiveFrames()].
  int HalfReceptiveFrames() const;

  void Collect(const std::string& prefix, nn::ParamList& out) const;

  // Named sub-blocks, exposed for gradient-flow checks.
  const nn::Linear& conditioning() const { return cond_; }
  const nn::Linear& pitch_embedding() const { return pitch_embed_; }
  const nn::WaveNet& posterior_stack() const { return posterior_; }
  const nn::WaveNet& decoder_stack() const { return decoder_; }

 private:
  int stride_ = 4;
  int hidden_ = 0;
  int content_dim_ = 0, embed_dim_ = 0;
  nn::Linear pitch_embed_;
  nn::Linear cond_;
  nn::Linear down_;
  nn::LayerNorm down_norm_;
  nn::WaveNet posterior_;
  nn::WaveNet decoder_;
  nn::Linear up_;
  nn::LayerNorm up_norm_;
  nn::Linear out_;
};

struct WindowScore {
  int window = 0;
  ag::Var score;  // [1 x 1]
};

// One uniformly drawn start in [0, T - w] per window length w <= T;
// nullopt for windows longer than the input.
std::vector<std::optional<int>> SampleWindowStarts(int frames,
                                                   std::span<const int> windows,
                                                   Rng& rng);

// Ensemble of CNN discriminators over random mel windows. Each member has
// depth+1 stride-2 3x3 convolutions with leaky ReLU and dropout, instance
// norm on all but the first, and a linear head to a scalar.
class Discriminator {
 public:
  Discriminator() = default;
  Discriminator(const ModelConfig& cfg, Rng& rng);

  // Scores the given windows; starts[i] pairs with windows()[i]. Dropout is
  // applied only when dropout_rng is non-null.
  std::vector<WindowScore> Score(const ag::Var& mel,
                                 std::span<const std::optional<int>> starts,
                                 Rng* dropout_rng) const;

  // Draws the window starts from rng, then scores (dropout on, same rng).
  std::vector<WindowScore> Discriminate(const ag::Var& mel, Rng& rng) const;

  const std::vector<int>& windows() const { return windows_; }
  void Collect(const std::string& prefix, nn::ParamList& out) const;

 private:
  struct Member {
    std::vector<nn::Conv2d> convs;
    nn::Linear head;
  };
  std::vector<int> windows_;
  std::vector<Member> members_;
  int mel_dim_ = 0;
  double dropout_ = 0.0;
  double slope_ = 0.2;
};

}  // namespace rxvc

#endif  // RXVC_SYNTHESIS_H_

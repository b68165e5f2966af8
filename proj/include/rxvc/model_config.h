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

#ifndef RXVC_MODEL_CONFIG_H_
#define RXVC_MODEL_CONFIG_H_

#include <vector>

namespace rxvc {

// Network sizes. Defaults are the full-scale values; ToyModelConfig()
// shrinks the widths for CPU experiments.
struct ModelConfig {
  int vocab_size = 100;
  int mel_dim = 80;
  int hidden = 192;

  // content encoder
  int content_layers = 4;
  int content_heads = 2;
  int content_ffn = 768;
  int max_rel_offset = 64;

  // timbre encoder
  int timbre_layers = 3;
  int timbre_hidden = 128;  // per direction
  int embed_dim = 256;

  // decoder
  int pitch_embed_dim = 16;
  int posterior_layers = 8;
  int decoder_layers = 4;
  int wavenet_kernel = 5;
  int stride = 4;

  // multi-length discriminator
  std::vector<int> disc_windows = {32, 64, 128};
  int disc_depth = 2;  // conv layers after the first, each with instance norm
  int disc_channels = 32;
  double disc_dropout = 0.1;
  double leaky_slope = 0.2;

  // Throws InvalidInput on inconsistent sizes.
  void Validate() const;
};

ModelConfig FullModelConfig();
ModelConfig ToyModelConfig();

}  // namespace rxvc

#endif  // RXVC_MODEL_CONFIG_H_

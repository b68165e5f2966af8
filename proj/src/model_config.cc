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

#include "rxvc/model_config.h"

#include <string>

#include "rxvc/errors.h"

namespace rxvc {

void ModelConfig::Validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidInput("model config: " + what);
  };
  need(vocab_size >= 2, "vocab_size must be >= 2");
  need(mel_dim >= 1 && hidden >= 1 && embed_dim >= 1, "sizes must be positive");
  need(content_heads >= 1 && hidden % content_heads == 0,
       "hidden must be divisible by content_heads");
  need(content_layers >= 1 && content_ffn >= 1, "bad content encoder sizes");
  need(max_rel_offset >= 1, "max_rel_offset must be >= 1");
  need(timbre_layers >= 1 && timbre_hidden >= 1, "bad timbre encoder sizes");
  need(posterior_layers >= 1 && decoder_layers >= 1, "bad WaveNet depths");
  need(wavenet_kernel % 2 == 1, "wavenet_kernel must be odd");
  need(stride >= 1, "stride must be >= 1");
  need(!disc_windows.empty(), "at least one discriminator window");
  for (int w : disc_windows) need(w >= 1, "discriminator windows must be >= 1");
  need(disc_depth >= 0 && disc_channels >= 1, "bad discriminator sizes");
  need(disc_dropout >= 0.0 && disc_dropout < 1.0, "dropout must be in [0, 1)");
}

ModelConfig FullModelConfig() { return ModelConfig{}; }

ModelConfig ToyModelConfig() {
  ModelConfig cfg;
  cfg.vocab_size = 16;
  cfg.hidden = 64;
  cfg.content_ffn = 256;
  cfg.timbre_hidden = 32;
  return cfg;
}

}  // namespace rxvc

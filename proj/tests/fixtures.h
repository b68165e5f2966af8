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

// Shared fixtures for tests that need a small trained-from-scratch setup.

#ifndef RXVC_TESTS_FIXTURES_H_
#define RXVC_TESTS_FIXTURES_H_

#include <filesystem>
#include <string>
#include <vector>

#include "rxvc/config.h"
#include "rxvc/corpus.h"

namespace rxvc::testing {

// A deliberately small network so multi-step tests stay fast.
inline ModelConfig TinyModelConfig() {
  ModelConfig cfg = ToyModelConfig();
  cfg.vocab_size = 8;
  cfg.hidden = 16;
  cfg.content_layers = 2;
  cfg.content_ffn = 32;
  cfg.max_rel_offset = 8;
  cfg.timbre_layers = 1;
  cfg.timbre_hidden = 8;
  cfg.embed_dim = 16;
  cfg.pitch_embed_dim = 4;
  cfg.posterior_layers = 2;
  cfg.decoder_layers = 2;
  cfg.wavenet_kernel = 3;
  cfg.disc_windows = {16, 32};
  cfg.disc_depth = 1;
  cfg.disc_channels = 4;
  return cfg;
}

inline RunConfig TinyRunConfig() {
  RunConfig cfg = ToyRunConfig();
  cfg.model = TinyModelConfig();
  cfg.training.batch_size = 2;
  cfg.training.warmup_steps = 10;
  cfg.training.seed = 7;
  return cfg;
}

struct TinySetup {
  Manifest manifest;
  Tokenizer tokenizer;
  TrainingCorpus corpus;
};

// 2 speakers x 4 short utterances, features and tokens ready for training.
inline TinySetup MakeTinySetup(const std::string& name,
                               const RunConfig& cfg = TinyRunConfig()) {
  const auto dir = std::filesystem::temp_directory_path() / name;
  SyntheticCorpusOptions opts;
  opts.min_seconds = 0.7;
  opts.max_seconds = 0.8;
  TinySetup s;
  s.manifest = GenerateSyntheticCorpus(dir.string(), opts);
  auto feats = ExtractManifestFeatures(s.manifest, cfg.features);
  std::vector<MelSpectrogram> mels;
  for (const auto& f : feats) mels.push_back(f.mel);
  s.tokenizer = Tokenizer::Fit(mels, cfg.model.vocab_size, 3);
  s.corpus = BuildTrainingCorpus(s.manifest, std::move(feats), s.tokenizer);
  return s;
}

}  // namespace rxvc::testing

#endif  // RXVC_TESTS_FIXTURES_H_

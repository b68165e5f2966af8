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

#include <cmath>
#include <vector>

#include "doctest.h"
#include "rxvc/errors.h"
#include "rxvc/timbre_encoder.h"
#include "test_util.h"

namespace rxvc {
namespace {

MelSpectrogram RandomMel(int frames, Rng& rng) {
  MelSpectrogram mel;
  mel.frames = ag::RowMatrix(frames, 80);
  for (int t = 0; t < frames; ++t)
    for (int c = 0; c < 80; ++c) mel.frames(t, c) = Normal(rng) - 4.0;
  return mel;
}

TEST_CASE("full-size encoder gives 256-dim global and local embeddings") {
  ModelConfig cfg = FullModelConfig();
  Rng rng(1);
  TimbreEncoder enc(cfg, rng);
  CHECK(enc.num_layers() == 3);
  Rng data(2);
  ag::NoGradGuard guard;
  const SpeakerEmbedding e = enc.Encode(RandomMel(120, data));
  CHECK(e.local.rows() == 120);
  CHECK(e.local.cols() == 256);
  CHECK(e.global.rows() == 1);
  CHECK(e.global.cols() == 256);
}

TEST_CASE("shapes and mean pooling hold across lengths") {
  ModelConfig cfg = ToyModelConfig();
  Rng rng(3);
  TimbreEncoder enc(cfg, rng);
  Rng data(4);
  ag::NoGradGuard guard;
  for (int frames : {1, 2, 7, 120, 999}) {
    CAPTURE(frames);
    const SpeakerEmbedding e = enc.Encode(RandomMel(frames, data));
    REQUIRE(e.local.rows() == frames);
    REQUIRE(e.local.cols() == cfg.embed_dim);
    REQUIRE(e.global.cols() == cfg.embed_dim);
    for (int c = 0; c < cfg.embed_dim; ++c) {
      double sum = 0.0;
      for (int t = 0; t < frames; ++t) sum += e.local.at(t, c);
      CHECK(std::abs(e.global.at(0, c) - sum / frames) < 1e-5);
      CHECK(std::isfinite(e.global.at(0, c)));
    }
    if (frames == 1)
      for (int c = 0; c < cfg.embed_dim; ++c)
        CHECK(e.global.at(0, c) == e.local.at(0, c));
  }
}

TEST_CASE("encoding is deterministic") {
  ModelConfig cfg = ToyModelConfig();
  Rng rng(5);
  TimbreEncoder enc(cfg, rng);
  Rng data(6);
  const MelSpectrogram mel = RandomMel(40, data);
  const SpeakerEmbedding a = enc.Encode(mel);
  const SpeakerEmbedding b = enc.Encode(mel);
  CHECK(a.local.ToMatrix() == b.local.ToMatrix());
}

TEST_CASE("every parameter receives gradient from sum of the global embedding") {
  ModelConfig cfg = ToyModelConfig();
  Rng rng(7);
  TimbreEncoder enc(cfg, rng);
  nn::ParamList params;
  enc.Collect("timbre", params);
  REQUIRE(!params.empty());
  Rng data(8);
  ag::Backward(ag::SumAll(enc.Encode(RandomMel(25, data)).global));
  for (const auto& p : params) {
    CAPTURE(p.name);
    double norm = 0.0;
    for (double g : p.var.grad()) norm += g * g;
    CHECK(norm > 0.0);
  }
}

TEST_CASE("empty mel is rejected") {
  ModelConfig cfg = ToyModelConfig();
  Rng rng(9);
  TimbreEncoder enc(cfg, rng);
  MelSpectrogram mel;
  mel.frames = ag::RowMatrix(0, 80);
  CHECK_THROWS_AS(enc.Encode(mel), InvalidInput);
}

}  // namespace
}  // namespace rxvc

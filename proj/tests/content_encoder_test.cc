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
#include <set>
#include <vector>

#include "doctest.h"
#include "rxvc/content_encoder.h"
#include "rxvc/errors.h"
#include "test_util.h"

namespace rxvc {
namespace {

TokenSequence RandomTokens(int n, int vocab, Rng& rng) {
  TokenSequence seq;
  seq.vocab_size = vocab;
  for (int i = 0; i < n; ++i) seq.tokens.push_back(UniformInt(rng, 0, vocab - 1));
  return seq;
}

TEST_CASE("full-size output has 192 columns") {
  Rng rng(1);
  ContentEncoder enc(FullModelConfig(), rng);
  Rng data(2);
  ag::NoGradGuard guard;
  const ag::Var h = enc.Encode(RandomTokens(50, 100, data));
  CHECK(h.rows() == 50);
  CHECK(h.cols() == 192);
}

TEST_CASE("single token passes straight through every layer") {
  const ModelConfig cfg = ToyModelConfig();
  Rng rng(3);
  ContentEncoder enc(cfg, rng);
  TokenSequence seq{{5}, cfg.vocab_size};
  ag::NoGradGuard guard;
  const ag::Var h = enc.Encode(seq);

  // Attention over one position has weight 1, so each block reduces to
  // output(value(x)) + residual.
  ag::Var x = ag::SliceRows(enc.embedding(), 5, 1);
  for (const auto& layer : enc.layers()) {
    const ag::Var attn = layer.attn.output.Forward(layer.attn.value.Forward(x));
    const ag::Var a = layer.norm1.Forward(ag::Add(x, attn));
    const ag::Var f =
        layer.ffn_out.Forward(ag::Relu(layer.ffn_in.Forward(a)));
    x = layer.norm2.Forward(ag::Add(a, f));
  }
  for (int c = 0; c < cfg.hidden; ++c)
    CHECK(h.at(0, c) == doctest::Approx(x.at(0, c)).epsilon(1e-12));
}

TEST_CASE("encoding is deterministic and independent of position origin") {
  const ModelConfig cfg = ToyModelConfig();
  Rng rng(4);
  ContentEncoder enc(cfg, rng);
  nn::ParamList params;
  enc.Collect("content", params);
  for (const auto& p : params)
    CHECK(p.name.find("pos") == std::string::npos);

  Rng data(5);
  const TokenSequence seq = RandomTokens(90, cfg.vocab_size, data);
  ag::NoGradGuard guard;
  const ag::RowMatrix a = enc.Encode(seq).ToMatrix();
  CHECK(a == enc.Encode(seq).ToMatrix());
  for (int origin : {1, 37, 1000, -250}) {
    const ag::RowMatrix b = enc.Encode(seq, origin).ToMatrix();
    CHECK((a - b).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("attention rows sum to one in every layer and head") {
  const ModelConfig cfg = ToyModelConfig();
  Rng rng(6);
  ContentEncoder enc(cfg, rng);
  Rng data(7);
  std::vector<ag::Var> attention;
  ag::NoGradGuard guard;
  enc.Encode(RandomTokens(33, cfg.vocab_size, data), 0, &attention);
  REQUIRE(attention.size() ==
          static_cast<size_t>(cfg.content_layers * cfg.content_heads));
  for (const auto& w : attention) {
    const ag::RowMatrix m = w.ToMatrix();
    CHECK(m.minCoeff() >= 0.0);
    for (int i = 0; i < m.rows(); ++i)
      CHECK(std::abs(m.row(i).sum() - 1.0) < 1e-5);
  }
}

TEST_CASE("gradient reaches exactly the embedding rows that appear") {
  const ModelConfig cfg = ToyModelConfig();
  Rng rng(8);
  ContentEncoder enc(cfg, rng);
  TokenSequence seq{{1, 3, 3, 9, 1, 14}, cfg.vocab_size};
  const std::set<int> present(seq.tokens.begin(), seq.tokens.end());
  ag::Backward(ag::SumAll(ag::Mul(enc.Encode(seq), enc.Encode(seq))));
  const ag::ConstMatMap g(enc.embedding().grad().data(), cfg.vocab_size,
                          cfg.hidden);
  for (int k = 0; k < cfg.vocab_size; ++k) {
    CAPTURE(k);
    if (present.count(k))
      CHECK(g.row(k).norm() > 0.0);
    else
      CHECK(g.row(k).norm() == 0.0);
  }
}

TEST_CASE("out-of-range and empty token sequences are rejected") {
  const ModelConfig cfg = ToyModelConfig();
  Rng rng(9);
  ContentEncoder enc(cfg, rng);
  CHECK_THROWS_AS(enc.Encode(TokenSequence{{0, 16}, 16}), RangeError);
  CHECK_THROWS_AS(enc.Encode(TokenSequence{{-1}, 16}), RangeError);
  CHECK_THROWS_AS(enc.Encode(TokenSequence{{}, 16}), InvalidInput);
}

}  // namespace
}  // namespace rxvc

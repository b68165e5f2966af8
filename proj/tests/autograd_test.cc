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

#include <vector>

#include "doctest.h"
#include "rxvc/autograd.h"
#include "rxvc/errors.h"
#include "rxvc/layers.h"
#include "test_util.h"

namespace rxvc {
namespace {

using ag::Var;
using testing::MaxRelGradError;
using testing::RandomConst;
using testing::RandomParam;

// Weighted sum so every output element carries a distinct gradient.
Var Project(const Var& y, const Var& w) { return ag::SumAll(ag::Mul(y, w)); }

TEST_CASE("elementwise and matrix ops match finite differences") {
  Rng rng(1);
  Var a = RandomParam(3, 4, rng);
  Var b = RandomParam(4, 5, rng);
  Var c = RandomParam(3, 4, rng);
  Var row = RandomParam(1, 4, rng);
  Var w35 = RandomConst(3, 5, rng);
  Var w34 = RandomConst(3, 4, rng);
  Var w33 = RandomConst(3, 3, rng);

  CHECK(MaxRelGradError([&] { return Project(ag::MatMul(a, b), w35); }, a) <
        1e-6);
  CHECK(MaxRelGradError([&] { return Project(ag::MatMul(a, b), w35); }, b) <
        1e-6);
  CHECK(MaxRelGradError(
            [&] { return Project(ag::MatMulNT(a, c), w33); }, c) < 1e-6);
  CHECK(MaxRelGradError([&] { return Project(ag::Tanh(ag::Mul(a, c)), w34); },
                        a) < 1e-6);
  CHECK(MaxRelGradError(
            [&] { return Project(ag::Sigmoid(ag::AddRow(a, row)), w34); },
            row) < 1e-6);
  CHECK(MaxRelGradError([&] { return Project(ag::SoftmaxRows(a), w34); }, a) <
        1e-6);
  CHECK(MaxRelGradError(
            [&] {
              return Project(ag::Transpose(ag::Sub(a, c)),
                             ag::Transpose(w34));
            },
            c) < 1e-6);
  CHECK(MaxRelGradError(
            [&] { return ag::MeanAbsError(ag::Scale(a, 1.5), c); }, a) <
        1e-6);
  CHECK(MaxRelGradError([&] { return Project(ag::LeakyRelu(a, 0.2), w34); },
                        a) < 1e-6);
}

TEST_CASE("normalization ops match finite differences") {
  Rng rng(2);
  Var x = RandomParam(5, 6, rng);
  Var gamma = RandomParam(1, 6, rng);
  Var beta = RandomParam(1, 6, rng);
  Var w = RandomConst(5, 6, rng);
  auto ln = [&] { return Project(ag::LayerNormRows(x, gamma, beta), w); };
  CHECK(MaxRelGradError(ln, x) < 1e-5);
  CHECK(MaxRelGradError(ln, gamma) < 1e-6);
  CHECK(MaxRelGradError(ln, beta) < 1e-6);
  CHECK(MaxRelGradError([&] { return Project(ag::InstanceNormCols(x), w); },
                        x) < 1e-5);
}

TEST_CASE("shape ops route gradients") {
  Rng rng(3);
  Var a = RandomParam(4, 3, rng);
  Var b = RandomParam(4, 2, rng);
  Var w = RandomConst(4, 5, rng);
  Var w36 = RandomConst(3, 6, rng);
  Var w62 = RandomConst(6, 2, rng);
  Var w13 = RandomConst(1, 3, rng);
  auto cat = [&] {
    const Var parts[] = {a, b};
    return Project(ag::ConcatCols(parts), w);
  };
  CHECK(MaxRelGradError(cat, b) < 1e-6);
  auto rows = [&] {
    const Var parts[] = {a, ag::SliceRows(a, 1, 2)};
    Var r = ag::ConcatRows(parts);
    return Project(ag::Reshape(r, 3, 6), w36);
  };
  CHECK(MaxRelGradError(rows, a) < 1e-6);
  auto pad = [&] {
    return Project(ag::PadRows(ag::SliceCols(a, 1, 2), 6),
                   w62);
  };
  CHECK(MaxRelGradError(pad, a) < 1e-6);
  auto mean = [&] {
    return Project(ag::MeanRows(a), w13);
  };
  CHECK(MaxRelGradError(mean, a) < 1e-6);
}

TEST_CASE("gather only touches referenced rows") {
  Rng rng(4);
  Var table = RandomParam(5, 3, rng);
  const std::vector<int> ids = {1, 3, 1};
  Var y = ag::GatherRows(table, ids);
  ag::Backward(ag::SumAll(y));
  auto g = table.grad();
  for (int c = 0; c < 3; ++c) {
    CHECK(g[0 * 3 + c] == 0.0);
    CHECK(g[1 * 3 + c] == 2.0);
    CHECK(g[2 * 3 + c] == 0.0);
    CHECK(g[3 * 3 + c] == 1.0);
    CHECK(g[4 * 3 + c] == 0.0);
  }
  const std::vector<int> bad = {5};
  CHECK_THROWS_AS(ag::GatherRows(table, bad), RangeError);
}

TEST_CASE("cosine embedding loss gradient") {
  Rng rng(5);
  Var a = RandomParam(1, 8, rng);
  Var b = RandomParam(1, 8, rng);
  CHECK(MaxRelGradError([&] { return ag::CosineEmbeddingLoss(a, b); }, a) <
        1e-6);
  CHECK(MaxRelGradError([&] { return ag::CosineEmbeddingLoss(a, b); }, b) <
        1e-6);
}

TEST_CASE("LSTM recurrence matches finite differences in both directions") {
  Rng rng(6);
  const int hidden = 3;
  Var gx = RandomParam(5, 4 * hidden, rng, 0.5);
  Var whh = RandomParam(hidden, 4 * hidden, rng, 0.5);
  Var w = RandomConst(5, hidden, rng);
  for (bool reverse : {false, true}) {
    auto loss = [&] { return Project(ag::LstmRecurrence(gx, whh, reverse), w); };
    CHECK(MaxRelGradError(loss, gx) < 1e-5);
    CHECK(MaxRelGradError(loss, whh) < 1e-5);
  }
}

TEST_CASE("LSTM reverse direction equals forward on the flipped sequence") {
  Rng rng(7);
  Var gx = RandomConst(6, 8, rng);
  Var whh = RandomConst(2, 8, rng);
  std::vector<double> flipped;
  for (int t = 5; t >= 0; --t)
    for (int c = 0; c < 8; ++c) flipped.push_back(gx.at(t, c));
  Var fwd = ag::LstmRecurrence(Var::Constant(6, 8, flipped), whh, false);
  Var bwd = ag::LstmRecurrence(gx, whh, true);
  for (int t = 0; t < 6; ++t)
    for (int c = 0; c < 2; ++c) CHECK(bwd.at(t, c) == fwd.at(5 - t, c));
}

TEST_CASE("convolutions match finite differences") {
  Rng rng(8);
  nn::Conv1d conv(3, 4, 5, 2, rng);
  Var x = RandomParam(9, 3, rng);
  Var w = RandomConst(9, 4, rng);
  auto loss = [&] { return Project(conv.Forward(x), w); };
  CHECK(MaxRelGradError(loss, x) < 1e-6);
  CHECK(MaxRelGradError(loss, conv.proj.weight) < 1e-6);

  nn::Conv2d conv2(2, 3, 3, 2, 1, rng);
  Var img = RandomParam(6 * 5, 2, rng);
  int oh = 0, ow = 0;
  Var probe = conv2.Forward(img, 6, 5, &oh, &ow);
  CHECK(oh == 3);
  CHECK(ow == 3);
  Var w2 = RandomConst(oh * ow, 3, rng);
  auto loss2 = [&] {
    int h, wd;
    return Project(conv2.Forward(img, 6, 5, &h, &wd), w2);
  };
  CHECK(MaxRelGradError(loss2, img) < 1e-6);
}

TEST_CASE("no-grad guard suppresses graph recording") {
  Rng rng(9);
  Var a = RandomParam(2, 2, rng);
  {
    ag::NoGradGuard guard;
    CHECK_FALSE(ag::Tanh(a).requires_grad());
  }
  CHECK(ag::Tanh(a).requires_grad());
}

}  // namespace
}  // namespace rxvc

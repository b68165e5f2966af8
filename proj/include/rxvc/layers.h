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

#ifndef RXVC_LAYERS_H_
#define RXVC_LAYERS_H_

#include <string>
#include <vector>

#include "rxvc/autograd.h"
#include "rxvc/random.h"

namespace rxvc::nn {

struct NamedParam {
  std::string name;
  ag::Var var;
};
using ParamList = std::vector<NamedParam>;

void ZeroGrad(const ParamList& params);

// Uniform(-1/sqrt(fan_in), 1/sqrt(fan_in)).
ag::Var UniformParam(int rows, int cols, int fan_in, Rng& rng);
ag::Var ConstantParam(int rows, int cols, double value);

struct Linear {
  Linear() = default;
  Linear(int in, int out, Rng& rng, bool bias = true);
  ag::Var Forward(const ag::Var& x) const;
  void Collect(const std::string& prefix, ParamList& out) const;

  ag::Var weight;  // [in x out]
  ag::Var bias;    // [1 x out], undefined when bias-free
};

struct LayerNorm {
  LayerNorm() = default;
  explicit LayerNorm(int dim);
  ag::Var Forward(const ag::Var& x) const;
  void Collect(const std::string& prefix, ParamList& out) const;

  ag::Var gamma, beta;
};

// Non-causal 1-D convolution over [T x C_in] with symmetric zero padding.
// Output length equals input length.
struct Conv1d {
  Conv1d() = default;
  Conv1d(int in, int out, int kernel, int dilation, Rng& rng);
  ag::Var Forward(const ag::Var& x) const;
  void Collect(const std::string& prefix, ParamList& out) const;

  int in_channels = 0, kernel = 1, dilation = 1;
  Linear proj;  // weight [kernel*in x out]
};

// 2-D convolution, stride and padding as configured, on maps stored as
// [H*W x C].
struct Conv2d {
  Conv2d() = default;
  Conv2d(int in, int out, int kernel, int stride, int padding, Rng& rng);
  ag::Var Forward(const ag::Var& x, int height, int width, int* out_height,
                  int* out_width) const;
  void Collect(const std::string& prefix, ParamList& out) const;

  int in_channels = 0, kernel = 3, stride = 1, padding = 0;
  Linear proj;  // weight [kernel*kernel*in x out]
};

// One bidirectional LSTM layer, output [T x 2H] = forward || backward.
struct BiLstmLayer {
  BiLstmLayer() = default;
  BiLstmLayer(int in, int hidden, Rng& rng);
  ag::Var Forward(const ag::Var& x) const;
  void Collect(const std::string& prefix, ParamList& out) const;

  Linear input_fwd, input_bwd;  // in -> 4H, with bias
  ag::Var recur_fwd, recur_bwd;  // [H x 4H]
};

// Non-causal WaveNet stack: dilated convolution, gated tanh/sigmoid unit,
// residual and skip 1x1 projections. Returns the summed skip outputs.
struct WaveNet {
  WaveNet() = default;
  WaveNet(int channels, int kernel, int layers, Rng& rng);
  ag::Var Forward(const ag::Var& x) const;
  void Collect(const std::string& prefix, ParamList& out) const;
  // Dilation of layer i: 1, 2, 4, 8, 1, 2, ...
  static int Dilation(int layer);
  // Frames on either side of t that can influence output t.
  int HalfReceptiveField() const;

  int channels = 0;
  std::vector<Conv1d> in_layers;
  std::vector<Linear> res_skip;
};

}  // namespace rxvc::nn

#endif  // RXVC_LAYERS_H_

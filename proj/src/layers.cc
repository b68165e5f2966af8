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

#include "rxvc/layers.h"

#include <cmath>
#include <memory>

#include "rxvc/errors.h"

namespace rxvc::nn {

using ag::Var;

void ZeroGrad(const ParamList& params) {
  for (const auto& p : params) {
    Var v = p.var;
    v.ZeroGrad();
  }
}

Var UniformParam(int rows, int cols, int fan_in, Rng& rng) {
  const double bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
  std::vector<double> v(static_cast<size_t>(rows) * cols);
  for (double& x : v) x = (2.0 * UniformReal(rng) - 1.0) * bound;
  return Var::Parameter(rows, cols, std::move(v));
}

Var ConstantParam(int rows, int cols, double value) {
  return Var::Parameter(rows, cols,
                        std::vector<double>(size_t(rows) * cols, value));
}

Linear::Linear(int in, int out, Rng& rng, bool with_bias)
    : weight(UniformParam(in, out, in, rng)) {
  if (with_bias) bias = UniformParam(1, out, in, rng);
}

Var Linear::Forward(const Var& x) const {
  Var y = ag::MatMul(x, weight);
  return bias.defined() ? ag::AddRow(y, bias) : y;
}

void Linear::Collect(const std::string& prefix, ParamList& out) const {
  out.push_back({prefix + ".weight", weight});
  if (bias.defined()) out.push_back({prefix + ".bias", bias});
}

LayerNorm::LayerNorm(int dim)
    : gamma(ConstantParam(1, dim, 1.0)), beta(ConstantParam(1, dim, 0.0)) {}

Var LayerNorm::Forward(const Var& x) const {
  return ag::LayerNormRows(x, gamma, beta);
}

void LayerNorm::Collect(const std::string& prefix, ParamList& out) const {
  out.push_back({prefix + ".gamma", gamma});
  out.push_back({prefix + ".beta", beta});
}

Conv1d::Conv1d(int in, int out, int kernel_size, int dil, Rng& rng)
    : in_channels(in),
      kernel(kernel_size),
      dilation(dil),
      proj(kernel_size * in, out, rng) {
  if (kernel % 2 == 0) throw InvalidInput("Conv1d: kernel must be odd");
}

Var Conv1d::Forward(const Var& x) const {
  const int steps = x.rows();
  const int width = kernel * in_channels;
  const int pad = dilation * (kernel - 1) / 2;
  auto index = std::make_shared<std::vector<int>>(size_t(steps) * width);
  for (int t = 0; t < steps; ++t) {
    for (int k = 0; k < kernel; ++k) {
      const int src = t + k * dilation - pad;
      int* dst = index->data() + size_t(t) * width + size_t(k) * in_channels;
      for (int c = 0; c < in_channels; ++c)
        dst[c] = (src >= 0 && src < steps) ? src * in_channels + c : -1;
    }
  }
  return proj.Forward(ag::IndexGather(x, steps, width, std::move(index)));
}

void Conv1d::Collect(const std::string& prefix, ParamList& out) const {
  proj.Collect(prefix, out);
}

Conv2d::Conv2d(int in, int out, int kernel_size, int stride_, int padding_,
               Rng& rng)
    : in_channels(in),
      kernel(kernel_size),
      stride(stride_),
      padding(padding_),
      proj(kernel_size * kernel_size * in, out, rng) {}

Var Conv2d::Forward(const Var& x, int height, int width, int* out_height,
                    int* out_width) const {
  if (x.rows() != height * width || x.cols() != in_channels)
    throw InvalidInput("Conv2d: input shape mismatch");
  const int oh = (height + 2 * padding - kernel) / stride + 1;
  const int ow = (width + 2 * padding - kernel) / stride + 1;
  const int patch = kernel * kernel * in_channels;
  auto index = std::make_shared<std::vector<int>>(size_t(oh) * ow * patch);
  int* p = index->data();
  for (int i = 0; i < oh; ++i) {
    for (int j = 0; j < ow; ++j) {
      for (int ki = 0; ki < kernel; ++ki) {
        for (int kj = 0; kj < kernel; ++kj) {
          const int r = i * stride + ki - padding;
          const int c = j * stride + kj - padding;
          const bool inside = r >= 0 && r < height && c >= 0 && c < width;
          for (int ch = 0; ch < in_channels; ++ch)
            *p++ = inside ? (r * width + c) * in_channels + ch : -1;
        }
      }
    }
  }
  *out_height = oh;
  *out_width = ow;
  return proj.Forward(ag::IndexGather(x, oh * ow, patch, std::move(index)));
}

void Conv2d::Collect(const std::string& prefix, ParamList& out) const {
  proj.Collect(prefix, out);
}

BiLstmLayer::BiLstmLayer(int in, int hidden, Rng& rng)
    : input_fwd(in, 4 * hidden, rng),
      input_bwd(in, 4 * hidden, rng),
      recur_fwd(UniformParam(hidden, 4 * hidden, hidden, rng)),
      recur_bwd(UniformParam(hidden, 4 * hidden, hidden, rng)) {}

Var BiLstmLayer::Forward(const Var& x) const {
  Var fwd = ag::LstmRecurrence(input_fwd.Forward(x), recur_fwd, false);
  Var bwd = ag::LstmRecurrence(input_bwd.Forward(x), recur_bwd, true);
  const Var parts[] = {fwd, bwd};
  return ag::ConcatCols(parts);
}

void BiLstmLayer::Collect(const std::string& prefix, ParamList& out) const {
  input_fwd.Collect(prefix + ".input_fwd", out);
  out.push_back({prefix + ".recur_fwd", recur_fwd});
  input_bwd.Collect(prefix + ".input_bwd", out);
  out.push_back({prefix + ".recur_bwd", recur_bwd});
}

WaveNet::WaveNet(int ch, int kernel, int layers, Rng& rng) : channels(ch) {
  for (int i = 0; i < layers; ++i) {
    in_layers.emplace_back(ch, 2 * ch, kernel, Dilation(i), rng);
    // The last layer only feeds the skip path.
    res_skip.emplace_back(ch, i + 1 < layers ? 2 * ch : ch, rng);
  }
}

int WaveNet::Dilation(int layer) { return 1 << (layer % 4); }

int WaveNet::HalfReceptiveField() const {
  int half = 0;
  for (size_t i = 0; i < in_layers.size(); ++i)
    half += in_layers[i].dilation * (in_layers[i].kernel - 1) / 2;
  return half;
}

Var WaveNet::Forward(const Var& input) const {
  Var x = input;
  Var skip;
  const int n = static_cast<int>(in_layers.size());
  for (int i = 0; i < n; ++i) {
    Var h = in_layers[i].Forward(x);
    Var acts = ag::Mul(ag::Tanh(ag::SliceCols(h, 0, channels)),
                       ag::Sigmoid(ag::SliceCols(h, channels, channels)));
    Var rs = res_skip[i].Forward(acts);
    Var s = i + 1 < n ? ag::SliceCols(rs, channels, channels) : rs;
    if (i + 1 < n) x = ag::Add(x, ag::SliceCols(rs, 0, channels));
    skip = skip.defined() ? ag::Add(skip, s) : s;
  }
  return skip;
}

void WaveNet::Collect(const std::string& prefix, ParamList& out) const {
  for (size_t i = 0; i < in_layers.size(); ++i) {
    in_layers[i].Collect(prefix + ".in." + std::to_string(i), out);
    res_skip[i].Collect(prefix + ".res_skip." + std::to_string(i), out);
  }
}

}  // namespace rxvc::nn

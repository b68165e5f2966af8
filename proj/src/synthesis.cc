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

#include "rxvc/synthesis.h"

#include "rxvc/errors.h"

namespace rxvc {

using ag::Var;

Var PitchInput(const NormalizedPitch& pitch) {
  std::vector<double> v;
  v.reserve(pitch.values.size() * 2);
  for (size_t t = 0; t < pitch.values.size(); ++t) {
    v.push_back(pitch.values[t]);
    v.push_back(pitch.voiced[t] ? 1.0 : 0.0);
  }
  return Var::Constant(static_cast<int>(pitch.values.size()), 2, std::move(v));
}

Decoder::Decoder(const ModelConfig& cfg, Rng& rng)
    : stride_(cfg.stride),
      hidden_(cfg.hidden),
      content_dim_(cfg.hidden),
      embed_dim_(cfg.embed_dim),
      pitch_embed_(2, cfg.pitch_embed_dim, rng),
      cond_(cfg.hidden + cfg.embed_dim + cfg.pitch_embed_dim, cfg.hidden, rng),
      down_(cfg.stride * cfg.hidden, cfg.hidden, rng),
      down_norm_(cfg.hidden),
      posterior_(cfg.hidden, cfg.wavenet_kernel, cfg.posterior_layers, rng),
      decoder_(cfg.hidden, cfg.wavenet_kernel, cfg.decoder_layers, rng),
      up_(cfg.hidden, cfg.stride * cfg.hidden, rng),
      up_norm_(cfg.hidden),
      out_(cfg.hidden, cfg.mel_dim, rng) {}

int Decoder::LatentLength(int frames) const {
  return (frames + stride_ - 1) / stride_;
}

int Decoder::HalfReceptiveFrames() const {
  const int latent = posterior_.HalfReceptiveField() +
                     decoder_.HalfReceptiveField();
  return (latent + 1) * stride_ - 1;
}

Var Decoder::Decode(const Var& h_s, const Var& fused,
                    const NormalizedPitch& pitch) const {
  const int frames = h_s.rows();
  if (frames < 1) throw InvalidInput("decode: empty input");
  if (fused.rows() != frames || static_cast<int>(pitch.values.size()) != frames)
    throw InvalidInput("decode: content has " + std::to_string(frames) +
                       " frames, timbre " + std::to_string(fused.rows()) +
                       ", pitch " + std::to_string(pitch.values.size()));
  if (h_s.cols() != content_dim_ || fused.cols() != embed_dim_)
    throw InvalidInput("decode: feature dimension mismatch");
  const Var parts[] = {h_s, fused, pitch_embed_.Forward(PitchInput(pitch))};
  const Var cond = cond_.Forward(ag::ConcatCols(parts));
  const int latent = LatentLength(frames);
  const int padded = latent * stride_;
  Var x = ag::Reshape(ag::PadRows(cond, padded), latent, stride_ * hidden_);
  x = down_norm_.Forward(ag::Relu(down_.Forward(x)));
  x = decoder_.Forward(posterior_.Forward(x));
  x = ag::Reshape(up_.Forward(x), padded, hidden_);
  x = up_norm_.Forward(ag::Relu(x));
  return ag::SliceRows(out_.Forward(x), 0, frames);
}

void Decoder::Collect(const std::string& prefix, nn::ParamList& out) const {
  pitch_embed_.Collect(prefix + ".pitch_embed", out);
  cond_.Collect(prefix + ".cond", out);
  down_.Collect(prefix + ".down", out);
  down_norm_.Collect(prefix + ".down_norm", out);
  posterior_.Collect(prefix + ".posterior", out);
  decoder_.Collect(prefix + ".decoder", out);
  up_.Collect(prefix + ".up", out);
  up_norm_.Collect(prefix + ".up_norm", out);
  out_.Collect(prefix + ".out", out);
}

std::vector<std::optional<int>> SampleWindowStarts(int frames,
                                                   std::span<const int> windows,
                                                   Rng& rng) {
  std::vector<std::optional<int>> starts;
  for (int w : windows) {
    if (w <= frames)
      starts.emplace_back(static_cast<int>(UniformInt(rng, 0, frames - w)));
    else
      starts.emplace_back(std::nullopt);
  }
  return starts;
}

Discriminator::Discriminator(const ModelConfig& cfg, Rng& rng)
    : windows_(cfg.disc_windows),
      mel_dim_(cfg.mel_dim),
      dropout_(cfg.disc_dropout),
      slope_(cfg.leaky_slope) {
  for (int w : windows_) {
    Member m;
    int h = w, wd = cfg.mel_dim, in = 1;
    for (int l = 0; l <= cfg.disc_depth; ++l) {
      m.convs.emplace_back(in, cfg.disc_channels, 3, 2, 1, rng);
      in = cfg.disc_channels;
      h = (h - 1) / 2 + 1;
      wd = (wd - 1) / 2 + 1;
    }
    m.head = nn::Linear(h * wd * cfg.disc_channels, 1, rng);
    members_.push_back(std::move(m));
  }
}

std::vector<WindowScore> Discriminator::Score(
    const Var& mel, std::span<const std::optional<int>> starts,
    Rng* dropout_rng) const {
  if (starts.size() != windows_.size())
    throw InvalidInput("discriminate: one start per window expected");
  if (mel.cols() != mel_dim_)
    throw InvalidInput("discriminate: mel dimension mismatch");
  std::vector<WindowScore> scores;
  for (size_t i = 0; i < windows_.size(); ++i) {
    if (!starts[i]) continue;
    const int w = windows_[i];
    if (*starts[i] < 0 || *starts[i] + w > mel.rows())
      throw InvalidInput("discriminate: window out of range");
    int h = w, wd = mel_dim_;
    Var x = ag::Reshape(ag::SliceRows(mel, *starts[i], w), w * mel_dim_, 1);
    const auto& m = members_[i];
    for (size_t l = 0; l < m.convs.size(); ++l) {
      int oh, ow;
      x = m.convs[l].Forward(x, h, wd, &oh, &ow);
      if (l > 0) x = ag::InstanceNormCols(x);
      x = ag::LeakyRelu(x, slope_);
      if (dropout_rng) x = ag::Dropout(x, dropout_, *dropout_rng);
      h = oh;
      wd = ow;
    }
    x = ag::Reshape(x, 1, static_cast<int>(x.size()));
    scores.push_back({w, m.head.Forward(x)});
  }
  return scores;
}

std::vector<WindowScore> Discriminator::Discriminate(const Var& mel,
                                                     Rng& rng) const {
  if (mel.rows() < 1) throw InvalidInput("discriminate: empty mel");
  const auto starts = SampleWindowStarts(mel.rows(), windows_, rng);
  return Score(mel, starts, &rng);
}

void Discriminator::Collect(const std::string& prefix,
                            nn::ParamList& out) const {
  for (size_t i = 0; i < members_.size(); ++i) {
    const std::string p = prefix + ".w" + std::to_string(windows_[i]);
    for (size_t l = 0; l < members_[i].convs.size(); ++l)
      members_[i].convs[l].Collect(p + ".conv." + std::to_string(l), out);
    members_[i].head.Collect(p + ".head", out);
  }
}

}  // namespace rxvc

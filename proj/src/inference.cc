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

#include "rxvc/inference.h"

#include <algorithm>
#include <cmath>
#include <complex>

#include <Eigen/QR>

#include "rxvc/errors.h"
#include "rxvc/pmn.h"
#include "rxvc/stft.h"

namespace rxvc {

GriffinLimVocoder::GriffinLimVocoder(int n_iters, const FeatureConfig& cfg)
    : n_iters_(n_iters), cfg_(cfg) {
  if (n_iters < 0) throw InvalidInput("griffin-lim: n_iters must be >= 0");
  const ag::RowMatrix fb = MelFilterbank(cfg_);
  inverse_ = fb.completeOrthogonalDecomposition().pseudoInverse();
}

Waveform GriffinLimVocoder::Synthesize(const MelSpectrogram& mel) const {
  if (mel.num_mels() != cfg_.num_mels)
    throw InvalidInput("griffin-lim: expected " + std::to_string(cfg_.num_mels) +
                       " mel bands, got " + std::to_string(mel.num_mels()));
  const int frames = mel.num_frames();
  Waveform out;
  out.sample_rate = cfg_.sample_rate;
  if (frames < 2) return out;
  const size_t n = static_cast<size_t>(frames - 1) * cfg_.hop_samples;
  const Stft stft(cfg_.win_samples, cfg_.hop_samples);
  const int bins = stft.num_bins();

  const ag::RowMatrix linear =
      (mel.frames.array().exp().matrix() * inverse_.transpose())
          .cwiseMax(0.0);
  std::vector<std::complex<double>> spec(static_cast<size_t>(frames) * bins);
  for (int t = 0; t < frames; ++t)
    for (int k = 0; k < bins; ++k)
      spec[static_cast<size_t>(t) * bins + k] = linear(t, k);

  std::vector<double> x = stft.Inverse(spec, frames, n);
  for (int it = 0; it < n_iters_; ++it) {
    const auto rebuilt = stft.Forward(x);
    for (int t = 0; t < frames; ++t)
      for (int k = 0; k < bins; ++k) {
        const size_t i = static_cast<size_t>(t) * bins + k;
        const double mag = std::abs(rebuilt[i]);
        spec[i] = mag > 1e-12 ? linear(t, k) * rebuilt[i] / mag
                              : std::complex<double>(linear(t, k), 0.0);
      }
    x = stft.Inverse(spec, frames, n);
  }
  for (double& s : x) s = std::clamp(s, -1.0, 1.0);
  out.samples = std::move(x);
  return out;
}

Waveform MelToWaveform(const MelSpectrogram& mel, int n_iters,
                       const FeatureConfig& cfg) {
  return GriffinLimVocoder(n_iters, cfg).Synthesize(mel);
}

Converter::Converter(Checkpoint ckpt) : ckpt_(std::move(ckpt)) {
  if (ckpt_.tokenizer.empty())
    throw IncompatibleCheckpoint("checkpoint has no tokenizer");
}

Converter Converter::Load(const std::string& checkpoint_path) {
  return Converter(LoadCheckpoint(checkpoint_path));
}

ConversionResult Converter::ConvertFeatures(
    const MelSpectrogram& source_mel, const NormalizedPitch& source_pitch,
    std::span<const MelSpectrogram> reference_mels) const {
  if (reference_mels.empty())
    throw InvalidInput("convert: at least one reference is required");
  for (size_t i = 0; i < reference_mels.size(); ++i)
    if (reference_mels[i].num_frames() == 0)
      throw InvalidInput("convert: reference " + std::to_string(i) +
                         " has zero length");
  if (source_mel.num_frames() == 0)
    throw InvalidInput("convert: source has zero length");
  ag::NoGradGuard guard;
  const TokenSequence source_tokens = ckpt_.tokenizer.Tokenize(source_mel);
  std::vector<TokenSequence> ref_tokens;
  ref_tokens.reserve(reference_mels.size());
  for (const auto& m : reference_mels)
    ref_tokens.push_back(ckpt_.tokenizer.Tokenize(m));
  std::vector<ReferenceInput> refs;
  for (size_t i = 0; i < reference_mels.size(); ++i)
    refs.push_back({&reference_mels[i], &ref_tokens[i]});
  const GeneratorOutput out =
      ckpt_.model.generator.Forward(source_tokens, source_pitch, refs);
  ConversionResult result;
  result.mel_hat.frames = out.mel.ToMatrix();
  result.attention = out.attention.ToMatrix();
  result.boundaries = out.boundaries;
  return result;
}

ConversionResult Converter::Convert(const Waveform& source,
                                    std::span<const Waveform> references,
                                    const Vocoder& vocoder) const {
  const FeatureConfig& fc = ckpt_.config.features;
  for (size_t i = 0; i < references.size(); ++i)
    if (references[i].samples.empty())
      throw InvalidInput("convert: reference " + std::to_string(i) +
                         " has zero length");
  if (source.samples.empty())
    throw InvalidInput("convert: source has zero length");
  const UtteranceFeatures src = ExtractUtteranceFeatures(source, fc);
  std::vector<MelSpectrogram> ref_mels;
  for (const auto& r : references)
    ref_mels.push_back(ExtractUtteranceFeatures(r, fc).mel);
  ConversionResult result = ConvertFeatures(src.mel, src.pitch, ref_mels);
  result.waveform = vocoder.Synthesize(result.mel_hat);
  return result;
}

SpeakerEmbedding Converter::EncodeSpeaker(const MelSpectrogram& mel) const {
  ag::NoGradGuard guard;
  return ckpt_.model.generator.timbre.Encode(mel);
}

ConversionResult Convert(const ConversionRequest& req) {
  if (req.reference_audio_paths.empty())
    throw InvalidInput("convert: at least one reference is required");
  const Converter converter = Converter::Load(req.checkpoint_path);
  const Waveform source = ReadWav(req.source_audio_path);
  std::vector<Waveform> refs;
  for (const auto& p : req.reference_audio_paths) refs.push_back(ReadWav(p));
  const GriffinLimVocoder vocoder(req.n_griffin_lim_iters,
                                  converter.checkpoint().config.features);
  ConversionResult result = converter.Convert(source, refs, vocoder);
  if (!req.output_path.empty()) WriteWav(req.output_path, result.waveform);
  if (!req.mel_dump_path.empty())
    WriteMelCache(req.mel_dump_path, result.mel_hat);
  if (!req.attention_dump_path.empty())
    ExportAttention(req.attention_dump_path, result.attention,
                    result.boundaries);
  return result;
}

}  // namespace rxvc

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

#include "rxvc/corpus.h"

#include <algorithm>
#include <array>
#include <cmath>
#include <filesystem>
#include <numbers>

#include "rxvc/errors.h"
#include "rxvc/random.h"

namespace rxvc {
namespace {

namespace fs = std::filesystem;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

// First three formants (Hz) of five cardinal vowels.
constexpr std::array<std::array<double, 3>, 5> kVowels = {{
    {730, 1090, 2440},
    {270, 2290, 3010},
    {300, 870, 2240},
    {530, 1840, 2480},
    {570, 840, 2410},
}};
constexpr std::array<double, 3> kBandwidth = {90, 110, 160};
constexpr std::array<double, 3> kFormantGain = {1.0, 0.6, 0.3};

struct Segment {
  int begin = 0, end = 0;
  int vowel = -1;  // -1 marks a noise burst
};

double Envelope(double f, const std::array<double, 3>& formants) {
  double e = 0.02;
  for (int i = 0; i < 3; ++i) {
    const double d = (f - formants[i]) / kBandwidth[i];
    e += kFormantGain[i] / (1.0 + d * d);
  }
  return e;
}

}  // namespace

Waveform SynthesizeUtterance(int speaker, double seconds, uint64_t seed,
                             int sample_rate) {
  if (speaker < 0 || seconds <= 0.0 || sample_rate <= 0)
    throw InvalidInput("synthesize_utterance: bad arguments");
  Rng rng = StreamRng(seed, 0x73796e, static_cast<uint64_t>(speaker));
  const double f0_base = 110.0 * std::pow(1.6, speaker % 3);
  const double formant_scale = 1.0 + 0.17 * (speaker % 4);
  const auto n = static_cast<int>(seconds * sample_rate);
  const int edge = sample_rate / 12;

  std::vector<Segment> plan;
  int pos = edge;
  while (pos < n - edge) {
    if (!plan.empty() && plan.back().vowel >= 0 && UniformReal(rng) < 0.5) {
      const int len = static_cast<int>((0.04 + 0.04 * UniformReal(rng)) *
                                       sample_rate);
      plan.push_back({pos, std::min(pos + len, n - edge), -1});
    } else {
      const int len = static_cast<int>((0.14 + 0.12 * UniformReal(rng)) *
                                       sample_rate);
      plan.push_back({pos, std::min(pos + len, n - edge),
                      static_cast<int>(UniformInt(rng, 0, 4))});
    }
    pos = plan.back().end;
  }

  const double wobble_rate = 2.0 + 2.0 * UniformReal(rng);
  const double wobble_phase = kTwoPi * UniformReal(rng);
  const double smooth = 1.0 - std::exp(-1.0 / (0.012 * sample_rate));
  const int ramp = sample_rate / 100;

  Waveform wav;
  wav.sample_rate = sample_rate;
  wav.samples.assign(static_cast<size_t>(n), 0.0);
  std::array<double, 3> formants{};
  for (int i = 0; i < 3; ++i) formants[i] = kVowels[0][i] * formant_scale;
  std::vector<double> phase(64, 0.0);
  double prev_noise = 0.0;
  for (const Segment& seg : plan) {
    for (int t = seg.begin; t < seg.end; ++t) {
      const int from_edge = std::min(t - seg.begin, seg.end - 1 - t);
      const double gain =
          from_edge >= ramp
              ? 1.0
              : 0.5 - 0.5 * std::cos(std::numbers::pi * from_edge / ramp);
      const double time = static_cast<double>(t) / sample_rate;
      double s = 0.0;
      if (seg.vowel >= 0) {
        for (int i = 0; i < 3; ++i)
          formants[i] += smooth * (kVowels[seg.vowel][i] * formant_scale -
                                   formants[i]);
        const double f0 =
            f0_base * (1.0 + 0.06 * std::sin(kTwoPi * wobble_rate * time +
                                             wobble_phase) -
                       0.08 * time / seconds);
        for (int k = 1; k <= 64 && k * f0 < 0.45 * sample_rate; ++k) {
          phase[k - 1] += kTwoPi * k * f0 / sample_rate;
          if (phase[k - 1] > kTwoPi) phase[k - 1] -= kTwoPi;
          s += Envelope(k * f0, formants) * std::sin(phase[k - 1]) / k;
        }
        s *= 0.25;
      } else {
        const double white = Normal(rng);
        s = 0.04 * (white - prev_noise);
        prev_noise = white;
      }
      wav.samples[static_cast<size_t>(t)] = gain * s;
    }
  }
  double peak = 0.0;
  for (double x : wav.samples) peak = std::max(peak, std::abs(x));
  const double norm = peak > 0.0 ? 0.7 / peak : 1.0;
  for (double& x : wav.samples) x = x * norm + 1e-3 * Normal(rng);
  return wav;
}

Manifest GenerateSyntheticCorpus(const std::string& dir,
                                 const SyntheticCorpusOptions& opts) {
  if (opts.num_speakers < 1 || opts.utterances_per_speaker < 1 ||
      opts.min_seconds <= 0.0 || opts.max_seconds < opts.min_seconds)
    throw InvalidInput("generate_corpus: bad options");
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw WriteError("cannot create directory " + dir);
  Manifest manifest;
  manifest.base_dir = dir;
  Rng rng = StreamRng(opts.seed, 0x6c656e);
  for (int s = 0; s < opts.num_speakers; ++s) {
    const std::string speaker = "spk" + std::to_string(s);
    const std::string language = s % 2 == 0 ? "en" : "zh";
    for (int u = 0; u < opts.utterances_per_speaker; ++u) {
      const double seconds =
          opts.min_seconds +
          (opts.max_seconds - opts.min_seconds) * UniformReal(rng);
      const uint64_t useed = MixSeed(opts.seed, static_cast<uint64_t>(
                                                    s * 1000 + u + 1));
      const Waveform wav =
          SynthesizeUtterance(s, seconds, useed, opts.sample_rate);
      const std::string id = speaker + "_u" + std::to_string(u);
      WriteWav((fs::path(dir) / (id + ".wav")).string(), wav);
      manifest.records.push_back({id, speaker, language, id + ".wav"});
    }
  }
  WriteManifest((fs::path(dir) / "manifest.tsv").string(), manifest);
  return manifest;
}

UtteranceFeatures ExtractUtteranceFeatures(const Waveform& wav,
                                           const FeatureConfig& cfg) {
  const Waveform w = Resample(wav, cfg.sample_rate);
  UtteranceFeatures f;
  f.mel = ComputeMel(w.samples, w.sample_rate, cfg);
  f.f0 = ExtractF0(w.samples, cfg);
  f.pitch = NormalizePitch(f.f0);
  return f;
}

std::vector<UtteranceFeatures> ExtractManifestFeatures(
    const Manifest& manifest, const FeatureConfig& cfg) {
  std::vector<UtteranceFeatures> out;
  out.reserve(manifest.records.size());
  for (const auto& r : manifest.records)
    out.push_back(ExtractUtteranceFeatures(ReadWav(manifest.ResolvePath(r)), cfg));
  return out;
}

TrainingCorpus BuildTrainingCorpus(const Manifest& manifest,
                                   std::vector<UtteranceFeatures> features,
                                   const Tokenizer& tokenizer) {
  if (features.size() != manifest.records.size())
    throw InvalidInput("build_training_corpus: one feature set per record");
  std::vector<TrainingUtterance> utts;
  for (size_t i = 0; i < features.size(); ++i) {
    const auto& r = manifest.records[i];
    TrainingUtterance u;
    u.utterance_id = r.utterance_id;
    u.speaker_id = r.speaker_id;
    u.language = r.language;
    u.tokens = tokenizer.Tokenize(features[i].mel);
    u.mel = std::move(features[i].mel);
    u.pitch = std::move(features[i].pitch);
    utts.push_back(std::move(u));
  }
  return TrainingCorpus(std::move(utts));
}

}  // namespace rxvc

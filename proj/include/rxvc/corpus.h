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

#ifndef RXVC_CORPUS_H_
#define RXVC_CORPUS_H_

#include <cstdint>
#include <string>
#include <vector>

#include "rxvc/audio.h"
#include "rxvc/features.h"
#include "rxvc/manifest.h"
#include "rxvc/training.h"

namespace rxvc {

struct SyntheticCorpusOptions {
  int num_speakers = 2;
  int utterances_per_speaker = 4;
  uint64_t seed = 1;
  double min_seconds = 1.0;
  double max_seconds = 1.4;
  int sample_rate = 16000;
};

// Vowel-like harmonic segments shaped by speaker-scaled formants,
// interleaved with short noise bursts. Speakers differ in F0 range and
// formant scale.
Waveform SynthesizeUtterance(int speaker, double seconds, uint64_t seed,
                             int sample_rate = 16000);

// Writes <dir>/<utterance>.wav and <dir>/manifest.tsv.
Manifest GenerateSyntheticCorpus(const std::string& dir,
                                 const SyntheticCorpusOptions& opts);

struct UtteranceFeatures {
  MelSpectrogram mel;
  PitchContour f0;
  NormalizedPitch pitch;
};

// Resamples to cfg.sample_rate when needed.
UtteranceFeatures ExtractUtteranceFeatures(const Waveform& wav,
                                           const FeatureConfig& cfg);
std::vector<UtteranceFeatures> ExtractManifestFeatures(
    const Manifest& manifest, const FeatureConfig& cfg);

TrainingCorpus BuildTrainingCorpus(const Manifest& manifest,
                                   std::vector<UtteranceFeatures> features,
                                   const Tokenizer& tokenizer);

}  // namespace rxvc

#endif  // RXVC_CORPUS_H_

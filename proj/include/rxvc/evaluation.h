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

#ifndef RXVC_EVALUATION_H_
#define RXVC_EVALUATION_H_

#include <map>
#include <string>
#include <vector>

#include "rxvc/audio.h"
#include "rxvc/features.h"
#include "rxvc/inference.h"
#include "rxvc/manifest.h"
#include "rxvc/pmn.h"

namespace rxvc {

using EmbeddingSet = std::map<std::string, std::vector<std::vector<double>>>;

struct SpeakerSpread {
  std::string speaker;
  std::vector<double> centroid;  // mean of unit-normalized embeddings
  double mean_distance = 0.0;    // to own centroid
};

struct EmbeddingSpaceReport {
  std::vector<SpeakerSpread> speakers;
  double intra = 0.0;  // mean over speakers of mean_distance
  double inter = 0.0;  // mean over centroid pairs
  double separation_ratio = 0.0;  // inter / max(intra, 1e-8)
};

double CosineDistance(const std::vector<double>& a,
                      const std::vector<double>& b);

// Cosine-distance spread of speaker embeddings. Needs >= 2 speakers with
// >= 2 embeddings each, all of one dimension; throws InvalidInput otherwise.
EmbeddingSpaceReport EmbeddingSpaceStats(const EmbeddingSet& embeddings);

struct F0Comparison {
  double pearson_r = 0.0;
  double overlap = 0.0;  // jointly voiced / voiced in source
  int joint_voiced = 0;
  int source_voiced = 0;
};

// Contours are truncated to the shorter one. Throws InsufficientVoicedFrames
// below 5 jointly voiced frames. r is 0 when either side has no variance.
F0Comparison CompareF0(const PitchContour& source,
                       const PitchContour& converted);
F0Comparison CompareF0(const Waveform& source, const Waveform& converted,
                       const FeatureConfig& cfg = {});

struct LabeledEmbedding {
  std::string speaker;
  std::string language;
  std::vector<double> values;
};

// One line per embedding: speaker, language, then the values, tab-separated.
void DumpProjectionInputs(const std::string& path,
                          const std::vector<LabeledEmbedding>& embeddings);
// Throws ParseError with the line number on malformed rows.
std::vector<LabeledEmbedding> ReadProjectionInputs(const std::string& path);

EmbeddingSet GroupBySpeaker(const std::vector<LabeledEmbedding>& embeddings);

// S_G of every manifest utterance under the converter's model.
std::vector<LabeledEmbedding> SpeakerEmbeddings(const Converter& converter,
                                                const Manifest& manifest);

// Reports come in two flavors: aligned text for people, and TSV records
// ("<kind>\t<key>\t<value>") for scripts.
std::string FormatEmbeddingReport(const EmbeddingSpaceReport& r);
std::string EmbeddingReportTsv(const EmbeddingSpaceReport& r);
std::string FormatF0Report(const F0Comparison& c);
std::string F0ReportTsv(const F0Comparison& c);
std::string FormatAttentionReport(const AlignmentDump& d);
std::string AttentionReportTsv(const AlignmentDump& d);

}  // namespace rxvc

#endif  // RXVC_EVALUATION_H_

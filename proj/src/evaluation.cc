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

#include "rxvc/evaluation.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rxvc/corpus.h"
#include "rxvc/errors.h"

namespace rxvc {
namespace {

constexpr double kEps = 1e-8;

double Norm(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  return buf;
}

}  // namespace

double CosineDistance(const std::vector<double>& a,
                      const std::vector<double>& b) {
  if (a.size() != b.size())
    throw InvalidInput("cosine distance: dimension mismatch");
  double dot = 0.0;
  for (size_t i = 0; i < a.size(); ++i) dot += a[i] * b[i];
  return 1.0 - dot / std::max(Norm(a) * Norm(b), kEps);
}

EmbeddingSpaceReport EmbeddingSpaceStats(const EmbeddingSet& embeddings) {
  if (embeddings.size() < 2)
    throw InvalidInput("embedding stats: need at least 2 speakers, got " +
                       std::to_string(embeddings.size()));
  size_t dim = 0;
  EmbeddingSpaceReport report;
  for (const auto& [speaker, list] : embeddings) {
    if (list.size() < 2)
      throw InvalidInput("embedding stats: speaker '" + speaker +
                         "' needs at least 2 embeddings");
    SpeakerSpread s;
    s.speaker = speaker;
    for (const auto& e : list) {
      if (dim == 0) dim = e.size();
      if (e.size() != dim || dim == 0)
        throw InvalidInput("embedding stats: inconsistent dimensions");
      if (s.centroid.empty()) s.centroid.assign(dim, 0.0);
      const double n = std::max(Norm(e), kEps);
      for (size_t i = 0; i < dim; ++i) s.centroid[i] += e[i] / n;
    }
    for (double& c : s.centroid) c /= static_cast<double>(list.size());
    for (const auto& e : list) s.mean_distance += CosineDistance(e, s.centroid);
    s.mean_distance /= static_cast<double>(list.size());
    report.intra += s.mean_distance;
    report.speakers.push_back(std::move(s));
  }
  report.intra /= static_cast<double>(report.speakers.size());
  int pairs = 0;
  for (size_t i = 0; i < report.speakers.size(); ++i)
    for (size_t j = i + 1; j < report.speakers.size(); ++j, ++pairs)
      report.inter += CosineDistance(report.speakers[i].centroid,
                                     report.speakers[j].centroid);
  report.inter /= pairs;
  report.separation_ratio = report.inter / std::max(report.intra, kEps);
  return report;
}

F0Comparison CompareF0(const PitchContour& source,
                       const PitchContour& converted) {
  const size_t n = std::min(source.f0_hz.size(), converted.f0_hz.size());
  F0Comparison c;
  std::vector<double> a, b;
  for (size_t t = 0; t < n; ++t) {
    if (!source.voiced[t]) continue;
    ++c.source_voiced;
    if (!converted.voiced[t]) continue;
    a.push_back(source.f0_hz[t]);
    b.push_back(converted.f0_hz[t]);
  }
  c.joint_voiced = static_cast<int>(a.size());
  if (c.joint_voiced < 5)
    throw InsufficientVoicedFrames(
        "compare_f0: only " + std::to_string(c.joint_voiced) +
        " jointly voiced frames (need 5)");
  c.overlap = static_cast<double>(c.joint_voiced) / c.source_voiced;
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= a.size();
  mb /= b.size();
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  const double denom = std::sqrt(saa * sbb);
  c.pearson_r = denom > 0.0 ? std::clamp(sab / denom, -1.0, 1.0) : 0.0;
  return c;
}

F0Comparison CompareF0(const Waveform& source, const Waveform& converted,
                       const FeatureConfig& cfg) {
  return CompareF0(ExtractUtteranceFeatures(source, cfg).f0,
                   ExtractUtteranceFeatures(converted, cfg).f0);
}

void DumpProjectionInputs(const std::string& path,
                          const std::vector<LabeledEmbedding>& embeddings) {
  std::ofstream out(path);
  if (!out) throw WriteError("cannot open " + path + " for writing");
  char buf[32];
  for (const auto& e : embeddings) {
    out << e.speaker << '\t' << e.language;
    for (double v : e.values) {
      std::snprintf(buf, sizeof(buf), "%.9g", v);
      out << '\t' << buf;
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw WriteError("failed writing " + path);
}

std::vector<LabeledEmbedding> ReadProjectionInputs(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open embedding dump " + path);
  std::vector<LabeledEmbedding> out;
  std::string line;
  for (int n = 1; std::getline(in, line); ++n) {
    if (line.empty()) continue;
    std::istringstream row(line);
    LabeledEmbedding e;
    std::string field;
    if (!std::getline(row, e.speaker, '\t') ||
        !std::getline(row, e.language, '\t') || e.speaker.empty())
      throw ParseError(path + ": expected speaker and language", n);
    while (std::getline(row, field, '\t')) {
      size_t used = 0;
      try {
        e.values.push_back(std::stod(field, &used));
      } catch (const std::exception&) {
        used = 0;
      }
      if (used == 0 || used != field.size())
        throw ParseError(path + ": bad value '" + field + "'", n);
    }
    if (e.values.empty()) throw ParseError(path + ": no values", n);
    out.push_back(std::move(e));
  }
  return out;
}

EmbeddingSet GroupBySpeaker(const std::vector<LabeledEmbedding>& embeddings) {
  EmbeddingSet set;
  for (const auto& e : embeddings) set[e.speaker].push_back(e.values);
  return set;
}

std::vector<LabeledEmbedding> SpeakerEmbeddings(const Converter& converter,
                                                const Manifest& manifest) {
  const FeatureConfig& fc = converter.checkpoint().config.features;
  std::vector<LabeledEmbedding> out;
  for (const auto& rec : manifest.records) {
    const Waveform wav = ReadWav(manifest.ResolvePath(rec));
    const SpeakerEmbedding emb =
        converter.EncodeSpeaker(ExtractUtteranceFeatures(wav, fc).mel);
    const auto v = emb.global.values();
    out.push_back({rec.speaker_id, rec.language, {v.begin(), v.end()}});
  }
  return out;
}

std::string FormatEmbeddingReport(const EmbeddingSpaceReport& r) {
  std::string s = "speaker embedding space (cosine distance)\n";
  for (const auto& sp : r.speakers) {
    s += "  " + sp.speaker + ": mean distance to centroid " +
         Num(sp.mean_distance) + "\n    centroid";
    for (double v : sp.centroid) s += " " + Num(v);
    s += "\n";
  }
  s += "  intra-speaker " + Num(r.intra) + "\n";
  s += "  inter-speaker " + Num(r.inter) + "\n";
  s += "  separation ratio " + Num(r.separation_ratio) + "\n";
  return s;
}

std::string EmbeddingReportTsv(const EmbeddingSpaceReport& r) {
  std::string s;
  for (const auto& sp : r.speakers) {
    s += "centroid\t" + sp.speaker + "\t";
    for (size_t i = 0; i < sp.centroid.size(); ++i)
      s += (i ? "," : "") + Num(sp.centroid[i]);
    s += "\nspeaker_intra\t" + sp.speaker + "\t" + Num(sp.mean_distance) +
         "\n";
  }
  s += "summary\tintra\t" + Num(r.intra) + "\n";
  s += "summary\tinter\t" + Num(r.inter) + "\n";
  s += "summary\tseparation_ratio\t" + Num(r.separation_ratio) + "\n";
  return s;
}

std::string FormatF0Report(const F0Comparison& c) {
  return "F0 comparison\n  pearson r " + Num(c.pearson_r) +
         "\n  voiced overlap " + Num(c.overlap) + " (" +
         std::to_string(c.joint_voiced) + " of " +
         std::to_string(c.source_voiced) + " source frames)\n";
}

std::string F0ReportTsv(const F0Comparison& c) {
  return "f0\tpearson_r\t" + Num(c.pearson_r) + "\nf0\toverlap\t" +
         Num(c.overlap) + "\nf0\tjoint_voiced\t" +
         std::to_string(c.joint_voiced) + "\nf0\tsource_voiced\t" +
         std::to_string(c.source_voiced) + "\n";
}

std::string FormatAttentionReport(const AlignmentDump& d) {
  std::string s = "attention over " + std::to_string(d.boundaries.size()) +
                  " reference blocks, " + std::to_string(d.source_frames) +
                  " source frames\n";
  for (size_t b = 0; b < d.boundaries.size(); ++b)
    s += "  block " + std::to_string(b) + " mass " +
         Num(d.BlockMass(static_cast<int>(b))) + "\n";
  return s;
}

std::string AttentionReportTsv(const AlignmentDump& d) {
  std::string s;
  for (size_t b = 0; b < d.boundaries.size(); ++b)
    s += "attention\tblock_mass_" + std::to_string(b) + "\t" +
         Num(d.BlockMass(static_cast<int>(b))) + "\n";
  return s;
}

}  // namespace rxvc

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

#include "rxvc/manifest.h"

#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include "rxvc/errors.h"

namespace rxvc {

namespace fs = std::filesystem;

std::string Manifest::ResolvePath(const UtteranceRecord& r) const {
  const fs::path p(r.audio_path);
  if (p.is_absolute() || base_dir.empty()) return p.string();
  return (fs::path(base_dir) / p).string();
}

Manifest ReadManifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open manifest " + path);
  Manifest m;
  m.base_dir = fs::path(path).parent_path().string();
  std::string line;
  int64_t number = 0;
  if (!std::getline(in, line)) throw ParseError(path + ": empty manifest", 1);
  ++number;
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kManifestHeader)
    throw ParseError(path + ": expected header '" +
                         std::string(kManifestHeader) + "'",
                     number);
  std::set<std::string> seen;
  while (std::getline(in, line)) {
    ++number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<std::string> cols;
    std::stringstream ss(line);
    std::string col;
    while (std::getline(ss, col, '\t')) cols.push_back(col);
    if (cols.size() != 4)
      throw ParseError(path + ": expected 4 tab-separated columns, got " +
                           std::to_string(cols.size()),
                       number);
    for (const auto& c : cols)
      if (c.empty()) throw ParseError(path + ": empty column", number);
    if (!seen.insert(cols[0]).second)
      throw ParseError(path + ": duplicate utterance id '" + cols[0] + "'",
                       number);
    m.records.push_back({cols[0], cols[1], cols[2], cols[3]});
  }
  if (m.records.empty()) throw ParseError(path + ": no records", number);
  return m;
}

void WriteManifest(const std::string& path, const Manifest& manifest) {
  std::ofstream out(path);
  if (!out) throw WriteError("cannot open " + path + " for writing");
  out << kManifestHeader << '\n';
  for (const auto& r : manifest.records)
    out << r.utterance_id << '\t' << r.speaker_id << '\t' << r.language << '\t'
        << r.audio_path << '\n';
  out.flush();
  if (!out) throw WriteError("failed writing " + path);
}

void CheckManifestForTraining(const Manifest& manifest, int n_refs,
                              ReferenceMode mode) {
  std::map<std::string, int> counts;
  for (const auto& r : manifest.records) ++counts[r.speaker_id];
  const int need = mode == ReferenceMode::kSourceExcluded ? n_refs + 1 : n_refs;
  for (const auto& [speaker, n] : counts)
    if (n < need)
      throw InsufficientReferences(
          "speaker '" + speaker + "' has " + std::to_string(n) +
          " utterances; training with n_refs = " + std::to_string(n_refs) +
          " in " + ToString(mode) + " mode needs at least " +
          std::to_string(need));
}

}  // namespace rxvc

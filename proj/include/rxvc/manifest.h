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

#ifndef RXVC_MANIFEST_H_
#define RXVC_MANIFEST_H_

#include <string>
#include <vector>

#include "rxvc/training.h"

namespace rxvc {

struct UtteranceRecord {
  std::string utterance_id;
  std::string speaker_id;
  std::string language;
  std::string audio_path;  // as written in the manifest
};

// Tab-separated, header line `utterance_id speaker_id language audio_path`.
// Relative audio paths resolve against the manifest's directory.
struct Manifest {
  std::vector<UtteranceRecord> records;
  std::string base_dir;

  std::string ResolvePath(const UtteranceRecord& r) const;
};

inline constexpr char kManifestHeader[] =
    "utterance_id\tspeaker_id\tlanguage\taudio_path";

// ParseError with the line number on malformed rows or duplicate ids.
Manifest ReadManifest(const std::string& path);
void WriteManifest(const std::string& path, const Manifest& manifest);

// InsufficientReferences naming the first speaker that cannot supply n_refs
// references under mode.
void CheckManifestForTraining(const Manifest& manifest, int n_refs,
                              ReferenceMode mode);

}  // namespace rxvc

#endif  // RXVC_MANIFEST_H_

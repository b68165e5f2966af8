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

#ifndef RXVC_CONFIG_H_
#define RXVC_CONFIG_H_

#include <string>
#include <vector>

#include "rxvc/features.h"
#include "rxvc/model_config.h"
#include "rxvc/training.h"

namespace rxvc {

// Everything a run needs besides data: front end, network sizes, training
// hyperparameters and the vocoder iteration count.
struct RunConfig {
  FeatureConfig features;
  ModelConfig model;
  TrainingConfig training;
  int griffin_lim_iters = 60;

  void Validate() const;
};

RunConfig FullRunConfig();
RunConfig ToyRunConfig();
// "full" (alias "paper") or "toy"; InvalidInput otherwise.
RunConfig PresetRunConfig(const std::string& name);

// Applies `key = value` lines on top of base. Blank lines and `#` comments
// are ignored. Unknown keys and malformed values raise ParseError naming the
// key and the 1-based line.
RunConfig ParseConfig(const std::string& text, const RunConfig& base);
RunConfig LoadConfigFile(const std::string& path, const RunConfig& base);

// Every key, one per line, in a form ParseConfig reads back exactly.
std::string FormatConfig(const RunConfig& cfg);

// Sets a single key; ParseError (without line) on failure.
void SetConfigValue(RunConfig& cfg, const std::string& key,
                    const std::string& value);

std::vector<std::string> ConfigKeys();

}  // namespace rxvc

#endif  // RXVC_CONFIG_H_

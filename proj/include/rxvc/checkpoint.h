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

#ifndef RXVC_CHECKPOINT_H_
#define RXVC_CHECKPOINT_H_

#include <cstdint>
#include <string>

#include "rxvc/config.h"
#include "rxvc/features.h"
#include "rxvc/model.h"
#include "rxvc/training.h"

namespace rxvc {

// Container: "RXVCCKP1", u32 version, u64 payload size, payload of named
// sections, u64 FNV-1a checksum of the payload.
inline constexpr uint32_t kCheckpointVersion = 1;

struct Checkpoint {
  RunConfig config;
  int64_t step = 0;
  Tokenizer tokenizer;
  Model model;
  Adam optim_g;  // bound to model's generator parameters
  Adam optim_d;  // bound to model's discriminator parameters
};

void SaveCheckpoint(const std::string& path, const RunConfig& config,
                    int64_t step, const Tokenizer& tokenizer,
                    const Model& model, const Adam& optim_g,
                    const Adam& optim_d);
void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt);

// Missing file, version mismatch, or parameters that do not fit the stored
// config raise IncompatibleCheckpoint; damaged content raises ParseError.
Checkpoint LoadCheckpoint(const std::string& path);

// Copies parameters, optimizer moments and the step counter into trainer,
// whose model must have the checkpoint's architecture.
void RestoreTrainer(const Checkpoint& ckpt, Trainer& trainer);

// Standalone codebook: "RXVCTOK1", u32 K, u32 dim, K*dim float64 values.
// Loading throws ParseError on damage and InvalidInput on an empty codebook.
void SaveTokenizer(const std::string& path, const Tokenizer& tokenizer);
Tokenizer LoadTokenizer(const std::string& path);

}  // namespace rxvc

#endif  // RXVC_CHECKPOINT_H_

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

#ifndef RXVC_TRAINING_H_
#define RXVC_TRAINING_H_

#include <cstdint>
#include <cstdio>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rxvc/features.h"
#include "rxvc/layers.h"
#include "rxvc/model.h"

namespace rxvc {

enum class ReferenceMode { kSourceExcluded, kSourceIncluded };

std::string ToString(ReferenceMode mode);
// Accepts "source_excluded" or "source_included"; InvalidInput otherwise.
ReferenceMode ParseReferenceMode(const std::string& text);

struct TrainingConfig {
  int batch_size = 16;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.98;
  double adam_eps = 1e-9;
  double base_lr = 0.002;  // peak of the Noam schedule
  int warmup_steps = 4000;
  int n_refs = 3;
  ReferenceMode ref_mode = ReferenceMode::kSourceExcluded;
  double lambda_adv = 1.0;
  double lambda_ss = 1.0;
  uint64_t seed = 0;
  int64_t steps = 2000;
  int64_t checkpoint_every = 500;  // 0 disables intermediate checkpoints

  void Validate() const;
};

// Sum over unordered pairs i < j of 1 - cos(e_i, e_j). Each embedding is
// [1 x D]. Norms below 1e-8 are clamped and reported through log::Warn.
ag::Var SpeakerSimilarityLoss(std::span<const ag::Var> embeddings);

// Draws n reference ids for source from the utterances of its speaker.
// source_excluded: n distinct ids, none equal to source. source_included:
// source in slot 0 followed by n - 1 distinct others.
std::vector<std::string> SampleReferences(
    std::span<const std::string> utterances, const std::string& source, int n,
    ReferenceMode mode, Rng& rng);

// base_lr * min(step / warmup, sqrt(warmup / step)), step >= 1.
double NoamLr(int64_t step, const TrainingConfig& cfg);

class Adam {
 public:
  Adam() = default;
  Adam(nn::ParamList params, double beta1, double beta2, double eps);

  // Applies one update from the accumulated gradients. Parameters that
  // received no gradient are treated as having a zero gradient.
  void Step(double lr);

  const nn::ParamList& params() const { return params_; }
  int64_t steps() const { return steps_; }
  void set_steps(int64_t steps) { steps_ = steps; }
  std::vector<ag::Buffer>& first_moments() { return m_; }
  std::vector<ag::Buffer>& second_moments() { return v_; }
  const std::vector<ag::Buffer>& first_moments() const { return m_; }
  const std::vector<ag::Buffer>& second_moments() const { return v_; }

 private:
  nn::ParamList params_;
  double beta1_ = 0.9, beta2_ = 0.98, eps_ = 1e-9;
  int64_t steps_ = 0;
  std::vector<ag::Buffer> m_, v_;
};

struct TrainingUtterance {
  std::string utterance_id;
  std::string speaker_id;
  std::string language;
  MelSpectrogram mel;
  TokenSequence tokens;
  NormalizedPitch pitch;
};

class TrainingCorpus {
 public:
  TrainingCorpus() = default;
  // Throws InvalidInput on duplicate ids or misaligned features.
  explicit TrainingCorpus(std::vector<TrainingUtterance> utterances);

  size_t size() const { return utterances_.size(); }
  const TrainingUtterance& at(size_t i) const { return utterances_.at(i); }
  int IndexOf(const std::string& utterance_id) const;
  const std::vector<std::string>& UtterancesOf(
      const std::string& speaker_id) const;

  // Throws InsufficientReferences when some speaker cannot supply n_refs
  // references under mode.
  void CheckReferences(int n_refs, ReferenceMode mode) const;

 private:
  std::vector<TrainingUtterance> utterances_;
  std::map<std::string, int> index_;
  std::map<std::string, std::vector<std::string>> by_speaker_;
};

struct ItemLoss {
  int utterance = 0;  // corpus index
  double mae = 0.0;
  double adv_g = 0.0;
  double adv_d = 0.0;
  double l_ss = 0.0;
};

struct LossReport {
  int64_t step = 0;
  double mae = 0.0;
  double adv_g = 0.0;
  double adv_d = 0.0;
  double l_ss = 0.0;
  double total_g = 0.0;
  double lr = 0.0;
  std::vector<ItemLoss> items;
};

class Trainer {
 public:
  // The model is initialized from cfg.seed. The corpus must outlive the
  // trainer.
  Trainer(const ModelConfig& model_cfg, const TrainingConfig& cfg,
          const TrainingCorpus& corpus);

  // One step on a batch drawn from the (seed, step) stream.
  LossReport Step();
  // One step on explicit corpus indices.
  LossReport Step(std::span<const int> batch);

  // Corpus indices of the batch for a given 1-based step.
  std::vector<int> SampleBatch(int64_t step) const;

  int64_t step() const { return step_; }
  void set_step(int64_t step) { step_ = step; }
  const TrainingConfig& config() const { return cfg_; }
  Model& model() { return model_; }
  const Model& model() const { return model_; }
  Adam& optim_g() { return optim_g_; }
  Adam& optim_d() { return optim_d_; }
  const Adam& optim_g() const { return optim_g_; }
  const Adam& optim_d() const { return optim_d_; }

 private:
  TrainingConfig cfg_;
  const TrainingCorpus* corpus_;
  Model model_;
  Adam optim_g_, optim_d_;
  int64_t step_ = 0;
};

// Tab-separated `step mae adv_g adv_d l_ss lr`, one line per step, flushed
// every 10 steps and on destruction.
class TrainingLog {
 public:
  explicit TrainingLog(const std::string& path);
  ~TrainingLog();
  TrainingLog(const TrainingLog&) = delete;
  TrainingLog& operator=(const TrainingLog&) = delete;

  void Append(const LossReport& report);
  void Flush();

 private:
  std::string path_;
  std::FILE* file_ = nullptr;
  int64_t pending_ = 0;
};

}  // namespace rxvc

#endif  // RXVC_TRAINING_H_

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

#include "rxvc/training.h"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include "rxvc/errors.h"
#include "rxvc/log.h"

namespace rxvc {
namespace {

// Stream tags for the per-step random streams.
constexpr uint64_t kBatchStream = 0x6261746368;
constexpr uint64_t kItemStream = 0x6974656d;
constexpr uint64_t kDropoutD = 0x64726f7064;
constexpr uint64_t kDropoutG = 0x64726f7067;

ag::Var Square(const ag::Var& x) { return ag::Mul(x, x); }

// Mean of [1 x 1] terms; undefined Var when there are none.
ag::Var MeanOf(const std::vector<ag::Var>& terms) {
  if (terms.empty()) return ag::Var();
  const ag::Var stacked =
      terms.size() == 1 ? terms[0] : ag::ConcatCols(terms);
  return ag::MeanAll(stacked);
}

bool Finite(double x) { return std::isfinite(x); }

}  // namespace

std::string ToString(ReferenceMode mode) {
  return mode == ReferenceMode::kSourceExcluded ? "source_excluded"
                                                : "source_included";
}

ReferenceMode ParseReferenceMode(const std::string& text) {
  if (text == "source_excluded") return ReferenceMode::kSourceExcluded;
  if (text == "source_included") return ReferenceMode::kSourceIncluded;
  throw InvalidInput("unknown reference mode '" + text +
                     "' (expected source_excluded or source_included)");
}

void TrainingConfig::Validate() const {
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidInput("training config: " + what);
  };
  need(batch_size >= 1, "batch_size must be >= 1");
  need(adam_beta1 >= 0.0 && adam_beta1 < 1.0, "adam_beta1 must be in [0, 1)");
  need(adam_beta2 >= 0.0 && adam_beta2 < 1.0, "adam_beta2 must be in [0, 1)");
  need(adam_eps > 0.0, "adam_eps must be positive");
  need(base_lr > 0.0, "base_lr must be positive");
  need(warmup_steps >= 1, "warmup_steps must be >= 1");
  need(n_refs >= 1, "n_refs must be >= 1");
  need(lambda_adv >= 0.0 && lambda_ss >= 0.0, "loss weights must be >= 0");
  need(steps >= 0, "steps must be >= 0");
  need(checkpoint_every >= 0, "checkpoint_every must be >= 0");
}

ag::Var SpeakerSimilarityLoss(std::span<const ag::Var> embeddings) {
  const size_t n = embeddings.size();
  if (n < 2)
    throw InvalidInput("speaker_similarity_loss: need at least 2 embeddings, got " +
                       std::to_string(n));
  for (size_t i = 0; i < n; ++i) {
    if (embeddings[i].rows() != 1 ||
        embeddings[i].cols() != embeddings[0].cols())
      throw InvalidInput("speaker_similarity_loss: embeddings must be [1 x D]");
    if (embeddings[i].mat().norm() < 1e-8)
      log::Warn("speaker_similarity_loss: embedding " + std::to_string(i) +
                " has near-zero norm; clamped");
  }
  std::vector<ag::Var> terms;
  for (size_t i = 0; i < n; ++i)
    for (size_t j = i + 1; j < n; ++j)
      terms.push_back(ag::CosineEmbeddingLoss(embeddings[i], embeddings[j]));
  return ag::SumAll(terms.size() == 1 ? terms[0] : ag::ConcatCols(terms));
}

std::vector<std::string> SampleReferences(
    std::span<const std::string> utterances, const std::string& source, int n,
    ReferenceMode mode, Rng& rng) {
  if (n < 1) throw InvalidInput("sample_references: n must be >= 1");
  std::vector<std::string> others;
  bool found = false;
  for (const auto& u : utterances) {
    if (u == source)
      found = true;
    else
      others.push_back(u);
  }
  if (!found)
    throw InvalidInput("sample_references: source '" + source +
                       "' is not among the speaker's utterances");
  const int need = mode == ReferenceMode::kSourceExcluded ? n : n - 1;
  if (static_cast<int>(others.size()) < need)
    throw InsufficientReferences(
        "sample_references: " + ToString(mode) + " needs " +
        std::to_string(need) + " utterances besides '" + source + "', have " +
        std::to_string(others.size()));
  // Partial Fisher-Yates: the first `need` slots become a uniform sample.
  for (int i = 0; i < need; ++i) {
    const auto j = static_cast<size_t>(
        UniformInt(rng, i, static_cast<int64_t>(others.size()) - 1));
    std::swap(others[i], others[j]);
  }
  std::vector<std::string> out;
  if (mode == ReferenceMode::kSourceIncluded) out.push_back(source);
  out.insert(out.end(), others.begin(), others.begin() + need);
  return out;
}

double NoamLr(int64_t step, const TrainingConfig& cfg) {
  if (step < 1)
    throw InvalidInput("noam_lr: step must be >= 1, got " +
                       std::to_string(step));
  const double s = static_cast<double>(step);
  const double w = static_cast<double>(cfg.warmup_steps);
  return cfg.base_lr * std::min(s / w, std::sqrt(w / s));
}

Adam::Adam(nn::ParamList params, double beta1, double beta2, double eps)
    : params_(std::move(params)), beta1_(beta1), beta2_(beta2), eps_(eps) {
  for (const auto& p : params_) {
    m_.emplace_back(p.var.size(), 0.0);
    v_.emplace_back(p.var.size(), 0.0);
  }
}

void Adam::Step(double lr) {
  ++steps_;
  const double c1 = 1.0 - std::pow(beta1_, static_cast<double>(steps_));
  const double c2 = 1.0 - std::pow(beta2_, static_cast<double>(steps_));
  for (size_t k = 0; k < params_.size(); ++k) {
    ag::Var p = params_[k].var;
    auto values = p.mutable_values();
    const auto grad = p.grad();
    auto& m = m_[k];
    auto& v = v_[k];
    for (size_t i = 0; i < values.size(); ++i) {
      const double g = grad.empty() ? 0.0 : grad[i];
      m[i] = beta1_ * m[i] + (1.0 - beta1_) * g;
      v[i] = beta2_ * v[i] + (1.0 - beta2_) * g * g;
      values[i] -= lr * (m[i] / c1) / (std::sqrt(v[i] / c2) + eps_);
    }
  }
}

TrainingCorpus::TrainingCorpus(std::vector<TrainingUtterance> utterances)
    : utterances_(std::move(utterances)) {
  for (size_t i = 0; i < utterances_.size(); ++i) {
    const auto& u = utterances_[i];
    if (!index_.emplace(u.utterance_id, static_cast<int>(i)).second)
      throw InvalidInput("duplicate utterance id '" + u.utterance_id + "'");
    if (u.mel.num_frames() == 0)
      throw InvalidInput("utterance '" + u.utterance_id + "' has no frames");
    CheckFrameAlignment(u.tokens, u.mel, u.utterance_id);
    if (u.pitch.values.size() != static_cast<size_t>(u.mel.num_frames()))
      throw InvalidInput("utterance '" + u.utterance_id +
                         "': pitch and mel frame counts differ");
    by_speaker_[u.speaker_id].push_back(u.utterance_id);
  }
}

int TrainingCorpus::IndexOf(const std::string& utterance_id) const {
  auto it = index_.find(utterance_id);
  if (it == index_.end())
    throw InvalidInput("unknown utterance '" + utterance_id + "'");
  return it->second;
}

const std::vector<std::string>& TrainingCorpus::UtterancesOf(
    const std::string& speaker_id) const {
  auto it = by_speaker_.find(speaker_id);
  if (it == by_speaker_.end())
    throw InvalidInput("unknown speaker '" + speaker_id + "'");
  return it->second;
}

void TrainingCorpus::CheckReferences(int n_refs, ReferenceMode mode) const {
  const size_t need = mode == ReferenceMode::kSourceExcluded
                          ? static_cast<size_t>(n_refs) + 1
                          : static_cast<size_t>(n_refs);
  for (const auto& [speaker, ids] : by_speaker_)
    if (ids.size() < need)
      throw InsufficientReferences(
          "speaker '" + speaker + "' has " + std::to_string(ids.size()) +
          " utterances; " + ToString(mode) + " with n_refs = " +
          std::to_string(n_refs) + " needs " + std::to_string(need));
}

Trainer::Trainer(const ModelConfig& model_cfg, const TrainingConfig& cfg,
                 const TrainingCorpus& corpus)
    : cfg_(cfg), corpus_(&corpus), model_(model_cfg, cfg.seed) {
  cfg_.Validate();
  if (corpus.size() == 0) throw InvalidInput("training corpus is empty");
  corpus.CheckReferences(cfg_.n_refs, cfg_.ref_mode);
  for (size_t i = 0; i < corpus.size(); ++i)
    if (corpus.at(i).tokens.vocab_size != model_cfg.vocab_size)
      throw InvalidInput("utterance '" + corpus.at(i).utterance_id +
                         "' was tokenized with a different vocabulary size");
  optim_g_ = Adam(model_.GeneratorParams(), cfg_.adam_beta1, cfg_.adam_beta2,
                  cfg_.adam_eps);
  optim_d_ = Adam(model_.DiscriminatorParams(), cfg_.adam_beta1,
                  cfg_.adam_beta2, cfg_.adam_eps);
}

std::vector<int> Trainer::SampleBatch(int64_t step) const {
  Rng rng = StreamRng(cfg_.seed, kBatchStream, static_cast<uint64_t>(step));
  const int n = static_cast<int>(corpus_->size());
  std::vector<int> batch;
  if (cfg_.batch_size <= n) {
    std::vector<int> order(n);
    std::iota(order.begin(), order.end(), 0);
    for (int i = 0; i < cfg_.batch_size; ++i) {
      const auto j = static_cast<size_t>(UniformInt(rng, i, n - 1));
      std::swap(order[i], order[j]);
      batch.push_back(order[i]);
    }
  } else {
    for (int i = 0; i < cfg_.batch_size; ++i)
      batch.push_back(static_cast<int>(UniformInt(rng, 0, n - 1)));
  }
  return batch;
}

LossReport Trainer::Step() { return Step(SampleBatch(step_ + 1)); }

LossReport Trainer::Step(std::span<const int> batch) {
  if (batch.empty()) throw InvalidInput("train_step: empty batch");
  const int64_t step = step_ + 1;
  const double lr = NoamLr(step, cfg_);
  const Discriminator& disc = model_.discriminator;

  struct ItemState {
    int index;
    GeneratorOutput out;
    ag::Var real;
    std::vector<std::optional<int>> starts;
  };
  std::vector<ItemState> items;
  items.reserve(batch.size());
  for (int index : batch) {
    const TrainingUtterance& src = corpus_->at(static_cast<size_t>(index));
    // Streams are keyed by the utterance's corpus index, so an item's draws
    // do not depend on which other items share its batch.
    Rng rng = StreamRng(cfg_.seed, kItemStream, static_cast<uint64_t>(step),
                        static_cast<uint64_t>(index));
    const auto ref_ids =
        SampleReferences(corpus_->UtterancesOf(src.speaker_id),
                         src.utterance_id, cfg_.n_refs, cfg_.ref_mode, rng);
    std::vector<ReferenceInput> refs;
    for (const auto& id : ref_ids) {
      const TrainingUtterance& r = corpus_->at(corpus_->IndexOf(id));
      refs.push_back({&r.mel, &r.tokens});
    }
    ItemState st{index, model_.generator.Forward(src.tokens, src.pitch, refs),
                 ag::Var::FromMatrix(src.mel.frames), {}};
    st.starts = SampleWindowStarts(src.mel.num_frames(), disc.windows(), rng);
    items.push_back(std::move(st));
  }

  LossReport report;
  report.step = step;
  report.lr = lr;
  report.items.resize(items.size());

  // Discriminator update on real vs detached generated mels.
  std::vector<ag::Var> d_terms;
  for (size_t b = 0; b < items.size(); ++b) {
    const ItemState& st = items[b];
    Rng drop = StreamRng(cfg_.seed, kDropoutD, static_cast<uint64_t>(step),
                         static_cast<uint64_t>(st.index));
    const auto real = disc.Score(st.real, st.starts, &drop);
    const auto fake = disc.Score(ag::Detach(st.out.mel), st.starts, &drop);
    std::vector<ag::Var> own;
    for (size_t w = 0; w < real.size(); ++w)
      own.push_back(ag::Add(Square(ag::AddScalar(real[w].score, -1.0)),
                            Square(fake[w].score)));
    if (!own.empty()) report.items[b].adv_d = MeanOf(own).item();
    d_terms.insert(d_terms.end(), own.begin(), own.end());
  }
  nn::ZeroGrad(optim_d_.params());
  if (!d_terms.empty()) {
    const ag::Var loss_d = MeanOf(d_terms);
    report.adv_d = loss_d.item();
    if (!Finite(report.adv_d))
      throw NumericalDivergence(step, "discriminator loss is not finite");
    ag::Backward(loss_d);
    optim_d_.Step(lr);
  }

  // Generator update.
  std::vector<ag::Var> maes, g_terms, ss_terms;
  for (size_t b = 0; b < items.size(); ++b) {
    const ItemState& st = items[b];
    ItemLoss& il = report.items[b];
    il.utterance = st.index;
    const ag::Var mae = ag::MeanAbsError(st.out.mel, st.real);
    il.mae = mae.item();
    maes.push_back(mae);
    Rng drop = StreamRng(cfg_.seed, kDropoutG, static_cast<uint64_t>(step),
                         static_cast<uint64_t>(st.index));
    const auto fake = disc.Score(st.out.mel, st.starts, &drop);
    std::vector<ag::Var> own;
    for (const auto& s : fake)
      own.push_back(Square(ag::AddScalar(s.score, -1.0)));
    if (!own.empty()) il.adv_g = MeanOf(own).item();
    g_terms.insert(g_terms.end(), own.begin(), own.end());
    if (st.out.ref_global.size() >= 2) {
      const ag::Var ss = SpeakerSimilarityLoss(st.out.ref_global);
      il.l_ss = ss.item();
      ss_terms.push_back(ss);
    }
  }
  ag::Var total = MeanOf(maes);
  report.mae = total.item();
  report.total_g = report.mae;
  if (!g_terms.empty()) {
    const ag::Var adv = MeanOf(g_terms);
    report.adv_g = adv.item();
    if (cfg_.lambda_adv > 0.0) {
      total = ag::Add(total, ag::Scale(adv, cfg_.lambda_adv));
      report.total_g += cfg_.lambda_adv * report.adv_g;
    }
  }
  if (!ss_terms.empty()) {
    // Per-item pair sums averaged over the whole batch; items with a single
    // reference contribute zero.
    const ag::Var ss = ag::Scale(ag::SumAll(ss_terms.size() == 1
                                                ? ss_terms[0]
                                                : ag::ConcatCols(ss_terms)),
                                 1.0 / static_cast<double>(items.size()));
    report.l_ss = ss.item();
    if (cfg_.lambda_ss > 0.0) {
      total = ag::Add(total, ag::Scale(ss, cfg_.lambda_ss));
      report.total_g += cfg_.lambda_ss * report.l_ss;
    }
  }
  if (!Finite(report.mae) || !Finite(report.adv_g) || !Finite(report.l_ss) ||
      !Finite(total.item()))
    throw NumericalDivergence(step, "generator loss is not finite");
  nn::ZeroGrad(optim_g_.params());
  ag::Backward(total);
  optim_g_.Step(lr);
  nn::ZeroGrad(optim_d_.params());
  step_ = step;
  return report;
}

TrainingLog::TrainingLog(const std::string& path) : path_(path) {
  file_ = std::fopen(path.c_str(), "w");
  if (!file_) throw WriteError("cannot open training log " + path);
}

TrainingLog::~TrainingLog() {
  if (file_) std::fclose(file_);
}

void TrainingLog::Append(const LossReport& r) {
  if (std::fprintf(file_, "%lld\t%.9g\t%.9g\t%.9g\t%.9g\t%.9g\n",
                   static_cast<long long>(r.step), r.mae, r.adv_g, r.adv_d,
                   r.l_ss, r.lr) < 0)
    throw WriteError("failed writing training log " + path_);
  if (++pending_ >= 10) Flush();
}

void TrainingLog::Flush() {
  pending_ = 0;
  if (std::fflush(file_) != 0)
    throw WriteError("failed flushing training log " + path_);
}

}  // namespace rxvc

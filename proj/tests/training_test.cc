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

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <vector>

#include "doctest.h"
#include "fixtures.h"
#include "rxvc/errors.h"
#include "rxvc/log.h"
#include "rxvc/training.h"
#include "test_util.h"

namespace rxvc {
namespace {

ag::Var Row(std::vector<double> v) {
  const int n = static_cast<int>(v.size());
  return ag::Var::Constant(1, n, std::move(v));
}

// Independent oracle: explicit double loop over ordered pairs, halved.
double BruteForcePairs(const std::vector<std::vector<double>>& e) {
  double total = 0.0;
  for (size_t i = 0; i < e.size(); ++i)
    for (size_t j = 0; j < e.size(); ++j) {
      if (i == j) continue;
      double dot = 0.0, ni = 0.0, nj = 0.0;
      for (size_t k = 0; k < e[i].size(); ++k) {
        dot += e[i][k] * e[j][k];
        ni += e[i][k] * e[i][k];
        nj += e[j][k] * e[j][k];
      }
      total += 1.0 - dot / (std::sqrt(ni) * std::sqrt(nj));
    }
  return total / 2.0;
}

double Loss(const std::vector<std::vector<double>>& e) {
  std::vector<ag::Var> vars;
  for (const auto& v : e) vars.push_back(Row(v));
  return SpeakerSimilarityLoss(vars).item();
}

TEST_CASE("speaker similarity loss closed forms") {
  CHECK(std::abs(Loss({{1, 2, 3}, {1, 2, 3}, {1, 2, 3}})) < 1e-6);
  CHECK(std::abs(Loss({{1, 0}, {0, 2}}) - 1.0) < 1e-6);
  // Pairwise cosines {0, 0.5, 0.5}.
  const double r = std::sqrt(0.5);
  CHECK(std::abs(Loss({{1, 0, 0}, {0, 1, 0}, {0.5, 0.5, r}}) - 2.0) < 1e-6);
}

TEST_CASE("speaker similarity loss matches the pairwise oracle and is invariant") {
  Rng rng(1);
  for (int n = 2; n <= 7; ++n) {
    std::vector<std::vector<double>> e(n);
    for (auto& v : e) v = testing::RandomValues(12, rng);
    const double loss = Loss(e);
    CHECK(std::abs(loss - BruteForcePairs(e)) < 1e-6);

    auto scaled = e;
    for (auto& v : scaled) {
      const double s = 0.01 + 100.0 * UniformReal(rng);
      for (double& x : v) x *= s;
    }
    CHECK(std::abs(Loss(scaled) - loss) < 1e-6);

    auto shuffled = e;
    std::reverse(shuffled.begin(), shuffled.end());
    std::rotate(shuffled.begin(), shuffled.begin() + 1, shuffled.end());
    CHECK(std::abs(Loss(shuffled) - loss) < 1e-6);
  }
}

TEST_CASE("speaker similarity loss edge cases") {
  CHECK_THROWS_AS(Loss({{1, 2}}), InvalidInput);
  CHECK_THROWS_AS(Loss({}), InvalidInput);
  log::SetQuiet(true);
  const int64_t before = log::WarningCount();
  const double v = Loss({{0, 0, 0}, {1, 0, 0}});
  log::SetQuiet(false);
  CHECK(log::WarningCount() == before + 1);
  CHECK(std::isfinite(v));
}

TEST_CASE("reference sampling honours the exclusion rule") {
  const std::vector<std::string> utts = {"a", "b", "c", "d"};
  Rng rng(2);
  for (int draw = 0; draw < 10000; ++draw) {
    const auto ex =
        SampleReferences(utts, "a", 3, ReferenceMode::kSourceExcluded, rng);
    REQUIRE(ex.size() == 3);
    REQUIRE(std::find(ex.begin(), ex.end(), "a") == ex.end());
    REQUIRE(std::set<std::string>(ex.begin(), ex.end()).size() == 3);

    const auto in =
        SampleReferences(utts, "a", 3, ReferenceMode::kSourceIncluded, rng);
    REQUIRE(in.size() == 3);
    REQUIRE(in[0] == "a");
    REQUIRE(std::count(in.begin(), in.end(), "a") == 1);
    REQUIRE(std::set<std::string>(in.begin(), in.end()).size() == 3);
  }
}

TEST_CASE("insufficient references are detected exactly") {
  const std::vector<std::string> utts = {"a", "b", "c", "d"};
  Rng rng(3);
  for (int n = 1; n <= 6; ++n) {
    CAPTURE(n);
    if (n <= 3)
      CHECK_NOTHROW(SampleReferences(utts, "b", n,
                                     ReferenceMode::kSourceExcluded, rng));
    else
      CHECK_THROWS_AS(SampleReferences(utts, "b", n,
                                       ReferenceMode::kSourceExcluded, rng),
                      InsufficientReferences);
    if (n <= 4)
      CHECK_NOTHROW(SampleReferences(utts, "b", n,
                                     ReferenceMode::kSourceIncluded, rng));
    else
      CHECK_THROWS_AS(SampleReferences(utts, "b", n,
                                       ReferenceMode::kSourceIncluded, rng),
                      InsufficientReferences);
  }
  const std::vector<std::string> three = {"a", "b", "c"};
  CHECK_THROWS_AS(
      SampleReferences(three, "a", 3, ReferenceMode::kSourceExcluded, rng),
      InsufficientReferences);
}

TEST_CASE("reference sampling covers every subset") {
  const std::vector<std::string> utts = {"a", "b", "c", "d", "e"};
  Rng rng(4);
  std::set<std::set<std::string>> seen;
  for (int draw = 0; draw < 2000; ++draw) {
    const auto ex =
        SampleReferences(utts, "c", 2, ReferenceMode::kSourceExcluded, rng);
    seen.insert(std::set<std::string>(ex.begin(), ex.end()));
  }
  CHECK(seen.size() == 6);  // C(4, 2)
}

TEST_CASE("Noam schedule values and shape") {
  TrainingConfig cfg;
  CHECK(NoamLr(2000, cfg) == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(NoamLr(4000, cfg) == doctest::Approx(0.002).epsilon(1e-12));
  CHECK(NoamLr(16000, cfg) == doctest::Approx(0.001).epsilon(1e-12));
  CHECK(std::abs(NoamLr(3999, cfg) - NoamLr(4000, cfg)) < 1e-6);
  CHECK(std::abs(NoamLr(4001, cfg) - NoamLr(4000, cfg)) < 1e-6);
  for (int64_t s = 4000; s < 40000; s += 7)
    REQUIRE(NoamLr(s + 1, cfg) < NoamLr(s, cfg));
  for (int64_t s = 1; s < 4000; ++s) REQUIRE(NoamLr(s + 1, cfg) > NoamLr(s, cfg));
  CHECK_THROWS_AS(NoamLr(0, cfg), InvalidInput);
  CHECK_THROWS_AS(NoamLr(-3, cfg), InvalidInput);
}

TEST_CASE("Adam first step moves each weight by lr against its gradient sign") {
  ag::Var w = ag::Var::Parameter(1, 3, {0.5, -1.0, 2.0});
  Adam opt({{"w", w}}, 0.9, 0.98, 1e-9);
  ag::Backward(ag::SumAll(ag::Mul(w, ag::Var::Constant(1, 3, {3.0, -0.5, 0.0}))));
  opt.Step(0.1);
  CHECK(w.at(0, 0) == doctest::Approx(0.4).epsilon(1e-8));
  CHECK(w.at(0, 1) == doctest::Approx(-0.9).epsilon(1e-8));
  CHECK(w.at(0, 2) == 2.0);
  CHECK(opt.steps() == 1);
}

TEST_CASE("training configuration validation") {
  TrainingConfig cfg;
  CHECK_NOTHROW(cfg.Validate());
  cfg.n_refs = 0;
  CHECK_THROWS_AS(cfg.Validate(), InvalidInput);
  cfg = TrainingConfig();
  cfg.lambda_ss = -1.0;
  CHECK_THROWS_AS(cfg.Validate(), InvalidInput);
  CHECK(ParseReferenceMode("source_included") == ReferenceMode::kSourceIncluded);
  CHECK_THROWS_AS(ParseReferenceMode("both"), InvalidInput);
}

TEST_CASE("train step reports and invariants") {
  const testing::TinySetup setup = testing::MakeTinySetup("rxvc_train_step");
  RunConfig cfg = testing::TinyRunConfig();

  SUBCASE("zero loss weights leave only the MAE") {
    cfg.training.lambda_adv = 0.0;
    cfg.training.lambda_ss = 0.0;
    Trainer trainer(cfg.model, cfg.training, setup.corpus);
    const LossReport r = trainer.Step();
    CHECK(r.total_g == r.mae);
    CHECK(r.step == 1);
    CHECK(trainer.step() == 1);
  }
  SUBCASE("identical items give identical losses") {
    Trainer trainer(cfg.model, cfg.training, setup.corpus);
    const std::vector<int> batch = {5, 5, 5};
    const LossReport r = trainer.Step(batch);
    REQUIRE(r.items.size() == 3);
    for (const auto& item : r.items) {
      CHECK(item.mae == r.items[0].mae);
      CHECK(item.adv_g == r.items[0].adv_g);
      CHECK(item.adv_d == r.items[0].adv_d);
      CHECK(item.l_ss == r.items[0].l_ss);
    }
  }
  SUBCASE("seeded runs are reproducible") {
    Trainer a(cfg.model, cfg.training, setup.corpus);
    Trainer b(cfg.model, cfg.training, setup.corpus);
    for (int s = 0; s < 3; ++s) {
      const LossReport ra = a.Step(), rb = b.Step();
      CHECK(ra.mae == rb.mae);
      CHECK(ra.adv_g == rb.adv_g);
      CHECK(ra.adv_d == rb.adv_d);
      CHECK(ra.l_ss == rb.l_ss);
      CHECK(ra.lr == rb.lr);
    }
  }
  SUBCASE("a single reference gives zero similarity loss") {
    cfg.training.n_refs = 1;
    Trainer trainer(cfg.model, cfg.training, setup.corpus);
    CHECK(trainer.Step().l_ss == 0.0);
  }
  SUBCASE("non-finite losses abort with the step number") {
    Trainer trainer(cfg.model, cfg.training, setup.corpus);
    trainer.Step();
    ag::Var w = trainer.model().GeneratorParams().back().var;
    w.mutable_values()[0] = std::nan("");
    try {
      trainer.Step();
      FAIL("expected NumericalDivergence");
    } catch (const NumericalDivergence& e) {
      CHECK(e.step() == 2);
    }
    CHECK(trainer.step() == 1);
  }
  SUBCASE("corpus without enough references is rejected up front") {
    cfg.training.n_refs = 4;
    CHECK_THROWS_AS(Trainer(cfg.model, cfg.training, setup.corpus),
                    InsufficientReferences);
  }
}

TEST_CASE("training log lines have six tab-separated fields") {
  const auto path =
      (std::filesystem::temp_directory_path() / "rxvc_train_log.tsv").string();
  {
    TrainingLog log(path);
    LossReport r;
    for (int i = 1; i <= 12; ++i) {
      r.step = i;
      r.mae = 1.0 / i;
      log.Append(r);
    }
  }
  std::ifstream in(path);
  std::string line;
  int lines = 0;
  while (std::getline(in, line)) {
    ++lines;
    CHECK(std::count(line.begin(), line.end(), '\t') == 5);
  }
  CHECK(lines == 12);
}

}  // namespace
}  // namespace rxvc

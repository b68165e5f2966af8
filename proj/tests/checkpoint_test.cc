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

#include <filesystem>
#include <fstream>
#include <string>

#include "doctest.h"
#include "fixtures.h"
#include "rxvc/binary_io.h"
#include "rxvc/checkpoint.h"
#include "rxvc/errors.h"

namespace rxvc {
namespace {

namespace fs = std::filesystem;

std::string TempPath(const std::string& name) {
  return (fs::temp_directory_path() / name).string();
}

bool SameParams(const nn::ParamList& a, const nn::ParamList& b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (a[i].name != b[i].name) return false;
    const auto x = a[i].var.values(), y = b[i].var.values();
    if (!std::equal(x.begin(), x.end(), y.begin(), y.end())) return false;
  }
  return true;
}

TEST_CASE("checkpoints round-trip bitwise and resume identically") {
  const testing::TinySetup setup = testing::MakeTinySetup("rxvc_ckpt_corpus");
  const RunConfig cfg = testing::TinyRunConfig();
  Trainer trainer(cfg.model, cfg.training, setup.corpus);
  trainer.Step();
  trainer.Step();
  const std::string path = TempPath("rxvc_ckpt_a.bin");
  SaveCheckpoint(path, cfg, trainer.step(), setup.tokenizer, trainer.model(),
                 trainer.optim_g(), trainer.optim_d());

  const Checkpoint ckpt = LoadCheckpoint(path);
  CHECK(ckpt.step == 2);
  CHECK(FormatConfig(ckpt.config) == FormatConfig(cfg));
  CHECK(ckpt.tokenizer.centroids() == setup.tokenizer.centroids());
  CHECK(SameParams(ckpt.model.GeneratorParams(),
                   trainer.model().GeneratorParams()));
  CHECK(SameParams(ckpt.model.DiscriminatorParams(),
                   trainer.model().DiscriminatorParams()));
  CHECK(ckpt.optim_g.steps() == trainer.optim_g().steps());
  CHECK(ckpt.optim_g.second_moments() == trainer.optim_g().second_moments());

  const std::string again = TempPath("rxvc_ckpt_b.bin");
  SaveCheckpoint(again, ckpt);
  CHECK(bin::ReadFile(path) == bin::ReadFile(again));

  Trainer resumed(cfg.model, cfg.training, setup.corpus);
  RestoreTrainer(ckpt, resumed);
  const LossReport a = trainer.Step(), b = resumed.Step();
  CHECK(a.step == 3);
  CHECK(b.step == 3);
  CHECK(a.mae == b.mae);
  CHECK(a.adv_d == b.adv_d);
  CHECK(SameParams(trainer.model().GeneratorParams(),
                   resumed.model().GeneratorParams()));
}

TEST_CASE("damaged or foreign checkpoints are rejected") {
  const RunConfig cfg = testing::TinyRunConfig();
  Model model(cfg.model, 1);
  Adam g(model.GeneratorParams(), 0.9, 0.98, 1e-9);
  Adam d(model.DiscriminatorParams(), 0.9, 0.98, 1e-9);
  const std::string path = TempPath("rxvc_ckpt_c.bin");
  SaveCheckpoint(path, cfg, 0, Tokenizer(), model, g, d);
  const std::string good = bin::ReadFile(path);

  CHECK_THROWS_AS(LoadCheckpoint(TempPath("rxvc_no_such_ckpt.bin")),
                  IncompatibleCheckpoint);

  std::string v2 = good;
  v2[8] = 2;
  bin::WriteFile(path, v2);
  CHECK_THROWS_AS(LoadCheckpoint(path), IncompatibleCheckpoint);

  std::string flipped = good;
  flipped[good.size() / 2] ^= 0x10;
  bin::WriteFile(path, flipped);
  CHECK_THROWS_AS(LoadCheckpoint(path), ParseError);

  bin::WriteFile(path, good.substr(0, good.size() - 100));
  CHECK_THROWS_AS(LoadCheckpoint(path), ParseError);

  std::string magic = good;
  magic[0] = 'X';
  bin::WriteFile(path, magic);
  CHECK_THROWS_AS(LoadCheckpoint(path), ParseError);

  bin::WriteFile(path, good);
  CHECK_NOTHROW(LoadCheckpoint(path));
}

}  // namespace
}  // namespace rxvc

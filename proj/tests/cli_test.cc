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
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "cli.h"
#include "doctest.h"
#include "fixtures.h"
#include "rxvc/binary_io.h"
#include "rxvc/checkpoint.h"
#include "rxvc/config.h"

namespace rxvc {
namespace {

namespace fs = std::filesystem;

struct Result {
  int code;
  std::string out, err;
};

Result RunCli(const std::vector<std::string>& args) {
  std::ostringstream out, err;
  const int code = cli::Run(args, out, err);
  return {code, out.str(), err.str()};
}

fs::path Fresh(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / name;
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

void Write(const fs::path& path, const std::string& text) {
  std::ofstream(path) << text;
}

TEST_CASE("errors exit nonzero with a one-line diagnostic") {
  const fs::path dir = Fresh("rxvc_cli_errors");
  const std::string missing = (dir / "no_such.bin").string();
  Result r = RunCli({"convert", "--checkpoint", missing, "--source", "a.wav",
                     "--ref", "b.wav", "--out", "c.wav"});
  CHECK(r.code != 0);
  CHECK(r.err.find(missing) != std::string::npos);
  CHECK(std::count(r.err.begin(), r.err.end(), '\n') == 1);

  Write(dir / "bad.cfg", "# comment\nhidden = 64\nbatch_sise = 3\n");
  r = RunCli({"--config", (dir / "bad.cfg").string(), "tokenize",
              "--manifest", "m.tsv", "--out", dir.string()});
  CHECK(r.code != 0);
  CHECK(r.err.find("batch_sise") != std::string::npos);
  CHECK(r.err.find("3") != std::string::npos);

  Write(dir / "dup.tsv", std::string(kManifestHeader) +
                             "\nu1\ts\ten\ta.wav\nu1\ts\ten\tb.wav\n");
  r = RunCli({"tokenize", "--manifest", (dir / "dup.tsv").string(), "--out",
              dir.string()});
  CHECK(r.code != 0);
  CHECK(r.err.find("'u1'") != std::string::npos);

  CHECK(RunCli({"frobnicate"}).code != 0);
  CHECK(RunCli({"--preset", "huge", "eval", "attention", "--dump", "x"}).code !=
        0);
  CHECK(RunCli({}).code != 0);
  CHECK(RunCli({"--help"}).code == 0);
}

TEST_CASE("eval embeddings prints the four report fields") {
  const fs::path dir = Fresh("rxvc_cli_embed");
  Write(dir / "emb.tsv",
        "a\ten\t1\t0\t0\na\ten\t0.9\t0.1\t0\n"
        "b\tzh\t0\t1\t0\nb\tzh\t0\t0.8\t0.2\n");
  const Result r = RunCli({"eval", "embeddings", "--embeddings",
                           (dir / "emb.tsv").string(), "--tsv"});
  REQUIRE(r.code == 0);
  for (const char* field :
       {"centroid\ta\t", "centroid\tb\t", "summary\tintra\t",
        "summary\tinter\t", "summary\tseparation_ratio\t"})
    CHECK(r.out.find(field) != std::string::npos);
  const Result text = RunCli(
      {"eval", "embeddings", "--embeddings", (dir / "emb.tsv").string()});
  CHECK(text.out.find("separation ratio") != std::string::npos);
}

std::string TinyConfigText() {
  RunConfig cfg = testing::TinyRunConfig();
  cfg.training.checkpoint_every = 2;
  return FormatConfig(cfg);
}

TEST_CASE("seeded pipeline runs are bit-reproducible") {
  const fs::path dir = Fresh("rxvc_cli_pipeline");
  Write(dir / "tiny.cfg", TinyConfigText());
  const std::string cfg = (dir / "tiny.cfg").string();
  REQUIRE(RunCli({"generate-corpus", "--out", (dir / "corpus").string(),
                  "--min-seconds", "0.7", "--max-seconds", "0.8"})
              .code == 0);
  const std::string manifest = (dir / "corpus" / "manifest.tsv").string();
  REQUIRE(RunCli({"--config", cfg, "tokenize", "--manifest", manifest,
                  "--out", (dir / "tok").string()})
              .code == 0);
  CHECK(LoadTokenizer((dir / "tok" / "tokenizer.bin").string()).vocab_size() ==
        8);

  for (const char* run : {"run_a", "run_b"}) {
    const Result r = RunCli({"--config", cfg, "--seed", "5", "train",
                             "--manifest", manifest, "--out",
                             (dir / run).string(), "--steps", "3"});
    REQUIRE_MESSAGE(r.code == 0, r.err);
  }
  for (const char* file : {"train.log", "ckpt_2.bin", "final.bin"})
    CHECK(bin::ReadFile((dir / "run_a" / file).string()) ==
          bin::ReadFile((dir / "run_b" / file).string()));
  const Checkpoint ckpt = LoadCheckpoint((dir / "run_a" / "final.bin").string());
  CHECK(ckpt.step == 3);
  CHECK(ckpt.config.training.seed == 5);

  const Result resumed = RunCli(
      {"train", "--manifest", manifest, "--out", (dir / "run_c").string(),
       "--checkpoint", (dir / "run_a" / "ckpt_2.bin").string(), "--steps",
       "3"});
  REQUIRE_MESSAGE(resumed.code == 0, resumed.err);
  CHECK(bin::ReadFile((dir / "run_c" / "final.bin").string()) ==
        bin::ReadFile((dir / "run_a" / "final.bin").string()));

  const std::string src = (dir / "corpus" / "spk0_u0.wav").string();
  const Result conv = RunCli(
      {"convert", "--checkpoint", (dir / "run_a" / "final.bin").string(),
       "--source", src, "--ref", (dir / "corpus" / "spk1_u1.wav").string(),
       "--out", (dir / "out.wav").string(), "--iters", "2",
       "--attention-dump", (dir / "att.txt").string()});
  REQUIRE_MESSAGE(conv.code == 0, conv.err);
  const Result att =
      RunCli({"eval", "attention", "--dump", (dir / "att.txt").string()});
  CHECK(att.code == 0);
  CHECK(att.out.find("block 0 mass 1.0") != std::string::npos);
  const Result f0 = RunCli({"eval", "f0", "--source", src, "--converted", src});
  CHECK(f0.code == 0);
  CHECK(f0.out.find("pearson r 1.000000") != std::string::npos);
}

}  // namespace
}  // namespace rxvc

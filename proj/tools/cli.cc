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

#include "cli.h"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <map>
#include <optional>

#include "CLI11.hpp"
#include "rxvc/checkpoint.h"
#include "rxvc/config.h"
#include "rxvc/corpus.h"
#include "rxvc/errors.h"
#include "rxvc/evaluation.h"
#include "rxvc/inference.h"
#include "rxvc/manifest.h"
#include "rxvc/training.h"

namespace rxvc::cli {
namespace {

namespace fs = std::filesystem;

struct Globals {
  std::string config_path;
  std::string preset = "full";
  std::optional<uint64_t> seed;
};

RunConfig ResolveConfig(const Globals& g) {
  RunConfig cfg = PresetRunConfig(g.preset);
  if (!g.config_path.empty()) cfg = LoadConfigFile(g.config_path, cfg);
  if (g.seed) cfg.training.seed = *g.seed;
  cfg.Validate();
  return cfg;
}

void EnsureDir(const std::string& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) throw WriteError("cannot create directory " + dir + ": " +
                           ec.message());
}

std::vector<MelSpectrogram> Mels(const std::vector<UtteranceFeatures>& f) {
  std::vector<MelSpectrogram> mels;
  for (const auto& x : f) mels.push_back(x.mel);
  return mels;
}

struct GenerateArgs {
  std::string out;
  SyntheticCorpusOptions opts;
};

void CmdGenerate(const Globals& g, const GenerateArgs& a, std::ostream& out) {
  SyntheticCorpusOptions opts = a.opts;
  if (g.seed) opts.seed = *g.seed;
  const Manifest m = GenerateSyntheticCorpus(a.out, opts);
  out << "wrote " << m.records.size() << " utterances and "
      << (fs::path(a.out) / "manifest.tsv").string() << "\n";
}

struct TokenizeArgs {
  std::string manifest, out;
};

void CmdTokenize(const Globals& g, const TokenizeArgs& a, std::ostream& out) {
  const RunConfig cfg = ResolveConfig(g);
  const Manifest m = ReadManifest(a.manifest);
  const auto feats = ExtractManifestFeatures(m, cfg.features);
  const auto mels = Mels(feats);
  const Tokenizer tok =
      Tokenizer::Fit(mels, cfg.model.vocab_size, cfg.training.seed);
  EnsureDir(a.out);
  std::map<std::string, TokenSequence> tokens;
  for (size_t i = 0; i < m.records.size(); ++i)
    tokens[m.records[i].utterance_id] = tok.Tokenize(mels[i]);
  const std::string tok_path = (fs::path(a.out) / "tokenizer.bin").string();
  const std::string seq_path = (fs::path(a.out) / "tokens.txt").string();
  SaveTokenizer(tok_path, tok);
  WriteTokenFile(seq_path, tokens);
  out << "wrote " << tok_path << " (K = " << tok.vocab_size() << ") and "
      << seq_path << "\n";
}

struct TrainArgs {
  std::string manifest, out, tokenizer, resume;
  std::optional<int64_t> steps;
};

void CmdTrain(const Globals& g, const TrainArgs& a, std::ostream& out) {
  RunConfig cfg = ResolveConfig(g);
  std::optional<Checkpoint> resume;
  if (!a.resume.empty()) {
    resume = LoadCheckpoint(a.resume);
    cfg = resume->config;
  }
  if (a.steps) cfg.training.steps = *a.steps;
  cfg.Validate();
  const Manifest m = ReadManifest(a.manifest);
  CheckManifestForTraining(m, cfg.training.n_refs, cfg.training.ref_mode);
  auto feats = ExtractManifestFeatures(m, cfg.features);
  Tokenizer tok;
  if (resume)
    tok = resume->tokenizer;
  else if (!a.tokenizer.empty())
    tok = LoadTokenizer(a.tokenizer);
  else
    tok = Tokenizer::Fit(Mels(feats), cfg.model.vocab_size, cfg.training.seed);
  const TrainingCorpus corpus = BuildTrainingCorpus(m, std::move(feats), tok);
  Trainer trainer(cfg.model, cfg.training, corpus);
  if (resume) RestoreTrainer(*resume, trainer);

  EnsureDir(a.out);
  const fs::path dir(a.out);
  TrainingLog log((dir / "train.log").string());
  const auto save = [&](const std::string& name) {
    const std::string path = (dir / name).string();
    SaveCheckpoint(path, cfg, trainer.step(), tok, trainer.model(),
                   trainer.optim_g(), trainer.optim_d());
    return path;
  };
  const auto t0 = std::chrono::steady_clock::now();
  while (trainer.step() < cfg.training.steps) {
    const LossReport r = trainer.Step();
    log.Append(r);
    if (r.step % cfg.training.checkpoint_every == 0)
      save("ckpt_" + std::to_string(r.step) + ".bin");
    if (r.step == 1 || r.step % 100 == 0 || r.step == cfg.training.steps) {
      const double secs = std::chrono::duration<double>(
                              std::chrono::steady_clock::now() - t0)
                              .count();
      char line[160];
      std::snprintf(line, sizeof(line),
                    "step %lld  mae %.4f  adv_g %.4f  adv_d %.4f  l_ss %.4f  "
                    "lr %.2e  %.0fs\n",
                    static_cast<long long>(r.step), r.mae, r.adv_g, r.adv_d,
                    r.l_ss, r.lr, secs);
      out << line << std::flush;
    }
  }
  log.Flush();
  out << "wrote " << save("final.bin") << "\n";
}

struct ConvertArgs {
  std::string checkpoint, source, out, mel_dump, attention_dump;
  std::vector<std::string> refs;
  int iters = 60;
};

void CmdConvert(const ConvertArgs& a, std::ostream& out) {
  ConversionRequest req;
  req.source_audio_path = a.source;
  req.reference_audio_paths = a.refs;
  req.checkpoint_path = a.checkpoint;
  req.output_path = a.out;
  req.n_griffin_lim_iters = a.iters;
  req.mel_dump_path = a.mel_dump;
  req.attention_dump_path = a.attention_dump;
  const ConversionResult r = Convert(req);
  out << "wrote " << a.out << " (" << r.mel_hat.num_frames() << " frames, "
      << r.waveform.samples.size() << " samples)\n";
}

struct EvalArgs {
  std::string checkpoint, manifest, embeddings, dump_out;
  std::string source, converted, attention;
  bool tsv = false;
};

void CmdEvalEmbeddings(const EvalArgs& a, std::ostream& out) {
  std::vector<LabeledEmbedding> emb;
  if (!a.embeddings.empty()) {
    emb = ReadProjectionInputs(a.embeddings);
  } else {
    if (a.checkpoint.empty() || a.manifest.empty())
      throw InvalidInput(
          "eval embeddings needs --embeddings, or --checkpoint and --manifest");
    emb = SpeakerEmbeddings(Converter::Load(a.checkpoint),
                            ReadManifest(a.manifest));
  }
  if (!a.dump_out.empty()) DumpProjectionInputs(a.dump_out, emb);
  const EmbeddingSpaceReport r = EmbeddingSpaceStats(GroupBySpeaker(emb));
  out << (a.tsv ? EmbeddingReportTsv(r) : FormatEmbeddingReport(r));
}

void CmdEvalF0(const Globals& g, const EvalArgs& a, std::ostream& out) {
  const RunConfig cfg = ResolveConfig(g);
  const F0Comparison c =
      CompareF0(ReadWav(a.source), ReadWav(a.converted), cfg.features);
  out << (a.tsv ? F0ReportTsv(c) : FormatF0Report(c));
}

void CmdEvalAttention(const EvalArgs& a, std::ostream& out) {
  const AlignmentDump d = ReadAlignmentDump(a.attention);
  out << (a.tsv ? AttentionReportTsv(d) : FormatAttentionReport(d));
}

std::string OneLine(std::string s) {
  std::replace(s.begin(), s.end(), '\n', ' ');
  return s;
}

}  // namespace

int Run(const std::vector<std::string>& args, std::ostream& out,
        std::ostream& err) {
  CLI::App app{"rxvc: multi-reference voice conversion toolkit"};
  app.require_subcommand(1);
  Globals g;
  app.add_option("--config", g.config_path, "key = value config file");
  app.add_option("--preset", g.preset, "base configuration")
      ->check(CLI::IsMember({"full", "paper", "toy"}))
      ->capture_default_str();
  app.add_option("--seed", g.seed, "override every seed");

  GenerateArgs gen;
  auto* c_gen = app.add_subcommand("generate-corpus",
                                   "write the bundled synthetic corpus");
  c_gen->add_option("--out", gen.out, "output directory")->required();
  c_gen->add_option("--speakers", gen.opts.num_speakers)->capture_default_str();
  c_gen->add_option("--per-speaker", gen.opts.utterances_per_speaker)
      ->capture_default_str();
  c_gen->add_option("--min-seconds", gen.opts.min_seconds)
      ->capture_default_str();
  c_gen->add_option("--max-seconds", gen.opts.max_seconds)
      ->capture_default_str();

  TokenizeArgs tk;
  auto* c_tok = app.add_subcommand("tokenize", "fit the k-means tokenizer");
  c_tok->add_option("--manifest", tk.manifest)->required();
  c_tok->add_option("--out", tk.out, "output directory")->required();

  TrainArgs tr;
  auto* c_train = app.add_subcommand("train", "train a model");
  c_train->add_option("--manifest", tr.manifest)->required();
  c_train->add_option("--out", tr.out, "run directory")->required();
  c_train->add_option("--tokenizer", tr.tokenizer, "codebook from tokenize");
  c_train->add_option("--checkpoint", tr.resume, "resume from checkpoint");
  c_train->add_option("--steps", tr.steps, "override training.steps");

  ConvertArgs cv;
  auto* c_conv = app.add_subcommand("convert", "convert one utterance");
  c_conv->add_option("--checkpoint", cv.checkpoint)->required();
  c_conv->add_option("--source", cv.source, "source WAV")->required();
  c_conv->add_option("--ref", cv.refs, "reference WAV (repeatable)")
      ->required();
  c_conv->add_option("--out", cv.out, "output WAV")->required();
  c_conv->add_option("--iters", cv.iters, "Griffin-Lim iterations")
      ->capture_default_str();
  c_conv->add_option("--mel-dump", cv.mel_dump, "write the converted mel");
  c_conv->add_option("--attention-dump", cv.attention_dump,
                     "write the cross-attention weights");

  EvalArgs ev;
  auto* c_eval = app.add_subcommand("eval", "objective evaluation");
  c_eval->require_subcommand(1);
  auto* e_emb = c_eval->add_subcommand("embeddings", "speaker separation");
  e_emb->add_option("--checkpoint", ev.checkpoint);
  e_emb->add_option("--manifest", ev.manifest);
  e_emb->add_option("--embeddings", ev.embeddings, "existing embedding dump");
  e_emb->add_option("--out", ev.dump_out, "write an embedding dump");
  e_emb->add_flag("--tsv", ev.tsv, "machine-readable output");
  auto* e_f0 = c_eval->add_subcommand("f0", "F0 contour agreement");
  e_f0->add_option("--source", ev.source)->required();
  e_f0->add_option("--converted", ev.converted)->required();
  e_f0->add_flag("--tsv", ev.tsv, "machine-readable output");
  auto* e_att = c_eval->add_subcommand("attention", "attention block mass");
  e_att->add_option("--dump", ev.attention)->required();
  e_att->add_flag("--tsv", ev.tsv, "machine-readable output");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "rxvc: error: " << OneLine(e.what()) << "\n";
    return 2;
  }

  try {
    if (c_gen->parsed()) CmdGenerate(g, gen, out);
    else if (c_tok->parsed()) CmdTokenize(g, tk, out);
    else if (c_train->parsed()) CmdTrain(g, tr, out);
    else if (c_conv->parsed()) CmdConvert(cv, out);
    else if (e_emb->parsed()) CmdEvalEmbeddings(ev, out);
    else if (e_f0->parsed()) CmdEvalF0(g, ev, out);
    else if (e_att->parsed()) CmdEvalAttention(ev, out);
  } catch (const std::exception& e) {
    err << "rxvc: error: " << OneLine(e.what()) << "\n";
    return 1;
  }
  return 0;
}

}  // namespace rxvc::cli

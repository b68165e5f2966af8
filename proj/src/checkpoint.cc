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

#include "rxvc/checkpoint.h"

#include <filesystem>
#include <map>

#include "rxvc/binary_io.h"
#include "rxvc/errors.h"

namespace rxvc {
namespace {

constexpr char kMagic[] = "RXVCCKP1";
constexpr size_t kMagicSize = 8;
const std::string kTokenizerMagic = "RXVCTOK1";

uint64_t Fnv1a(std::string_view data) {
  uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : data) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

void PutDoubles(bin::Writer& w, std::span<const double> v) {
  w.Put<uint64_t>(v.size());
  w.PutBytes(std::string_view(reinterpret_cast<const char*>(v.data()),
                              v.size() * sizeof(double)));
}

void GetDoubles(bin::Reader& r, std::span<double> out,
                const std::string& what) {
  const uint64_t n = r.Get<uint64_t>();
  if (n != out.size())
    throw IncompatibleCheckpoint(what + ": stored " + std::to_string(n) +
                                 " values, model expects " +
                                 std::to_string(out.size()));
  const auto bytes = r.GetBytes(n * sizeof(double));
  std::memcpy(out.data(), bytes.data(), bytes.size());
}

std::string EncodeParams(const nn::ParamList& params) {
  bin::Writer w;
  w.Put<uint32_t>(static_cast<uint32_t>(params.size()));
  for (const auto& p : params) {
    w.PutString(p.name);
    w.Put<uint32_t>(static_cast<uint32_t>(p.var.rows()));
    w.Put<uint32_t>(static_cast<uint32_t>(p.var.cols()));
    PutDoubles(w, p.var.values());
  }
  return w.data();
}

void DecodeParams(std::string_view data, const nn::ParamList& params,
                  const std::string& section) {
  bin::Reader r(data, "checkpoint section " + section);
  const uint32_t n = r.Get<uint32_t>();
  if (n != params.size())
    throw IncompatibleCheckpoint(section + ": stored " + std::to_string(n) +
                                 " tensors, model has " +
                                 std::to_string(params.size()));
  for (const auto& p : params) {
    const std::string name = r.GetString();
    const uint32_t rows = r.Get<uint32_t>(), cols = r.Get<uint32_t>();
    if (name != p.name || static_cast<int>(rows) != p.var.rows() ||
        static_cast<int>(cols) != p.var.cols())
      throw IncompatibleCheckpoint(section + ": tensor '" + name + "' [" +
                                   std::to_string(rows) + "x" +
                                   std::to_string(cols) +
                                   "] does not match model tensor '" + p.name +
                                   "'");
    ag::Var v = p.var;
    GetDoubles(r, v.mutable_values(), name);
  }
  if (!r.AtEnd()) throw ParseError(section + ": trailing bytes");
}

std::string EncodeAdam(const Adam& opt) {
  bin::Writer w;
  w.Put<int64_t>(opt.steps());
  w.Put<uint32_t>(static_cast<uint32_t>(opt.params().size()));
  for (size_t k = 0; k < opt.params().size(); ++k) {
    PutDoubles(w, opt.first_moments()[k]);
    PutDoubles(w, opt.second_moments()[k]);
  }
  return w.data();
}

void DecodeAdam(std::string_view data, Adam& opt, const std::string& section) {
  bin::Reader r(data, "checkpoint section " + section);
  opt.set_steps(r.Get<int64_t>());
  const uint32_t n = r.Get<uint32_t>();
  if (n != opt.params().size())
    throw IncompatibleCheckpoint(section + ": optimizer state for " +
                                 std::to_string(n) + " tensors, model has " +
                                 std::to_string(opt.params().size()));
  for (size_t k = 0; k < n; ++k) {
    GetDoubles(r, opt.first_moments()[k], section);
    GetDoubles(r, opt.second_moments()[k], section);
  }
  if (!r.AtEnd()) throw ParseError(section + ": trailing bytes");
}

std::string EncodeTokenizer(const Tokenizer& tok) {
  bin::Writer w;
  w.Put<uint32_t>(static_cast<uint32_t>(tok.vocab_size()));
  w.Put<uint32_t>(static_cast<uint32_t>(tok.dim()));
  const auto& c = tok.centroids();
  PutDoubles(w, std::span<const double>(c.data(), static_cast<size_t>(c.size())));
  return w.data();
}

Tokenizer DecodeTokenizer(std::string_view data) {
  bin::Reader r(data, "checkpoint section tokenizer");
  const uint32_t k = r.Get<uint32_t>(), dim = r.Get<uint32_t>();
  if (k == 0) {
    r.Get<uint64_t>();
    return Tokenizer();
  }
  ag::RowMatrix c(k, dim);
  GetDoubles(r, std::span<double>(c.data(), static_cast<size_t>(c.size())),
             "tokenizer");
  try {
    return Tokenizer(std::move(c));
  } catch (const InvalidInput& e) {
    throw ParseError(std::string("checkpoint tokenizer: ") + e.what());
  }
}

}  // namespace

void SaveCheckpoint(const std::string& path, const RunConfig& config,
                    int64_t step, const Tokenizer& tokenizer,
                    const Model& model, const Adam& optim_g,
                    const Adam& optim_d) {
  std::vector<std::pair<std::string, std::string>> sections;
  sections.emplace_back("config", FormatConfig(config));
  {
    bin::Writer w;
    w.Put<int64_t>(step);
    sections.emplace_back("state", w.data());
  }
  sections.emplace_back("tokenizer", EncodeTokenizer(tokenizer));
  sections.emplace_back("model.generator", EncodeParams(model.GeneratorParams()));
  sections.emplace_back("model.discriminator",
                        EncodeParams(model.DiscriminatorParams()));
  sections.emplace_back("optim.generator", EncodeAdam(optim_g));
  sections.emplace_back("optim.discriminator", EncodeAdam(optim_d));

  bin::Writer payload;
  payload.Put<uint32_t>(static_cast<uint32_t>(sections.size()));
  for (const auto& [name, body] : sections) {
    payload.PutString(name);
    payload.Put<uint64_t>(body.size());
    payload.PutBytes(body);
  }
  bin::Writer file;
  file.PutBytes(std::string_view(kMagic, kMagicSize));
  file.Put<uint32_t>(kCheckpointVersion);
  file.Put<uint64_t>(payload.data().size());
  file.PutBytes(payload.data());
  file.Put<uint64_t>(Fnv1a(payload.data()));
  bin::WriteFile(path, file.data());
}

void SaveCheckpoint(const std::string& path, const Checkpoint& ckpt) {
  SaveCheckpoint(path, ckpt.config, ckpt.step, ckpt.tokenizer, ckpt.model,
                 ckpt.optim_g, ckpt.optim_d);
}

Checkpoint LoadCheckpoint(const std::string& path) {
  if (!std::filesystem::is_regular_file(path))
    throw IncompatibleCheckpoint("checkpoint not found: " + path);
  const std::string data = bin::ReadFile(path);
  bin::Reader r(data, path);
  if (data.size() < kMagicSize ||
      r.GetBytes(kMagicSize) != std::string_view(kMagic, kMagicSize))
    throw ParseError(path + ": not a checkpoint (bad magic)");
  const uint32_t version = r.Get<uint32_t>();
  if (version != kCheckpointVersion)
    throw IncompatibleCheckpoint(path + ": checkpoint version " +
                                 std::to_string(version) + ", expected " +
                                 std::to_string(kCheckpointVersion));
  const uint64_t size = r.Get<uint64_t>();
  if (size > r.remaining()) throw ParseError(path + ": truncated data");
  const std::string_view payload = r.GetBytes(size);
  if (r.Get<uint64_t>() != Fnv1a(payload) || !r.AtEnd())
    throw ParseError(path + ": checksum mismatch");

  std::map<std::string, std::string_view> sections;
  bin::Reader pr(payload, path);
  const uint32_t count = pr.Get<uint32_t>();
  for (uint32_t i = 0; i < count; ++i) {
    const std::string name = pr.GetString();
    const uint64_t n = pr.Get<uint64_t>();
    if (n > pr.remaining()) throw ParseError(path + ": truncated data");
    sections[name] = pr.GetBytes(n);
  }
  auto section = [&](const std::string& name) {
    auto it = sections.find(name);
    if (it == sections.end())
      throw ParseError(path + ": missing section '" + name + "'");
    return it->second;
  };

  Checkpoint ckpt;
  ckpt.config = ParseConfig(std::string(section("config")), FullRunConfig());
  try {
    ckpt.config.Validate();
  } catch (const InvalidInput& e) {
    throw IncompatibleCheckpoint(path + ": " + e.what());
  }
  {
    bin::Reader sr(section("state"), "checkpoint section state");
    ckpt.step = sr.Get<int64_t>();
  }
  ckpt.tokenizer = DecodeTokenizer(section("tokenizer"));
  ckpt.model = Model(ckpt.config.model, ckpt.config.training.seed);
  DecodeParams(section("model.generator"), ckpt.model.GeneratorParams(),
               "model.generator");
  DecodeParams(section("model.discriminator"),
               ckpt.model.DiscriminatorParams(), "model.discriminator");
  const TrainingConfig& t = ckpt.config.training;
  ckpt.optim_g = Adam(ckpt.model.GeneratorParams(), t.adam_beta1,
                      t.adam_beta2, t.adam_eps);
  ckpt.optim_d = Adam(ckpt.model.DiscriminatorParams(), t.adam_beta1,
                      t.adam_beta2, t.adam_eps);
  DecodeAdam(section("optim.generator"), ckpt.optim_g, "optim.generator");
  DecodeAdam(section("optim.discriminator"), ckpt.optim_d,
             "optim.discriminator");
  return ckpt;
}

void RestoreTrainer(const Checkpoint& ckpt, Trainer& trainer) {
  auto copy_params = [](const nn::ParamList& from, const nn::ParamList& to) {
    if (from.size() != to.size())
      throw IncompatibleCheckpoint("checkpoint architecture differs");
    for (size_t i = 0; i < from.size(); ++i) {
      if (from[i].name != to[i].name || from[i].var.size() != to[i].var.size())
        throw IncompatibleCheckpoint("checkpoint tensor '" + from[i].name +
                                     "' does not match '" + to[i].name + "'");
      ag::Var dst = to[i].var;
      const auto src = from[i].var.values();
      std::copy(src.begin(), src.end(), dst.mutable_values().begin());
    }
  };
  copy_params(ckpt.model.GeneratorParams(), trainer.model().GeneratorParams());
  copy_params(ckpt.model.DiscriminatorParams(),
              trainer.model().DiscriminatorParams());
  auto copy_adam = [](const Adam& from, Adam& to) {
    to.set_steps(from.steps());
    to.first_moments() = from.first_moments();
    to.second_moments() = from.second_moments();
  };
  copy_adam(ckpt.optim_g, trainer.optim_g());
  copy_adam(ckpt.optim_d, trainer.optim_d());
  trainer.set_step(ckpt.step);
}

void SaveTokenizer(const std::string& path, const Tokenizer& tokenizer) {
  if (tokenizer.empty()) throw InvalidInput("save_tokenizer: empty codebook");
  bin::WriteFile(path, kTokenizerMagic + EncodeTokenizer(tokenizer));
}

Tokenizer LoadTokenizer(const std::string& path) {
  const std::string data = bin::ReadFile(path);
  if (data.compare(0, kTokenizerMagic.size(), kTokenizerMagic) != 0)
    throw ParseError(path + ": not a tokenizer file");
  Tokenizer tok =
      DecodeTokenizer(std::string_view(data).substr(kTokenizerMagic.size()));
  if (tok.empty()) throw InvalidInput(path + ": empty codebook");
  return tok;
}

}  // namespace rxvc

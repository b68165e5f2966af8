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

#include "rxvc/config.h"

#include <charconv>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>

#include "rxvc/errors.h"

namespace rxvc {
namespace {

struct Field {
  const char* key;
  std::function<std::string(const RunConfig&)> get;
  std::function<void(RunConfig&, const std::string&)> set;
};

std::string FormatDouble(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

template <typename T>
T ParseNumber(const std::string& key, const std::string& text) {
  T v{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, v);
  if (ec != std::errc() || ptr != end)
    throw ParseError("config key '" + key + "': cannot parse '" + text + "'");
  return v;
}

// Field bound to a numeric member reached through accessor f.
template <typename T, typename F>
Field NumericField(const char* key, F f) {
  return {key,
          [f](const RunConfig& c) {
            const T v = f(const_cast<RunConfig&>(c));
            if constexpr (std::is_floating_point_v<T>)
              return FormatDouble(v);
            else
              return std::to_string(v);
          },
          [f, key](RunConfig& c, const std::string& s) {
            f(c) = ParseNumber<T>(key, s);
          }};
}

#define RXVC_INT(k, path) \
  NumericField<int>(k, [](RunConfig& c) -> int& { return c.path; })
#define RXVC_I64(k, path) \
  NumericField<int64_t>(k, [](RunConfig& c) -> int64_t& { return c.path; })
#define RXVC_U64(k, path) \
  NumericField<uint64_t>(k, [](RunConfig& c) -> uint64_t& { return c.path; })
#define RXVC_DBL(k, path) \
  NumericField<double>(k, [](RunConfig& c) -> double& { return c.path; })

const std::vector<Field>& Fields() {
  static const std::vector<Field> fields = {
      RXVC_INT("sample_rate", features.sample_rate),
      RXVC_INT("hop_samples", features.hop_samples),
      RXVC_INT("win_samples", features.win_samples),
      RXVC_INT("num_mels", features.num_mels),
      RXVC_DBL("fmin_hz", features.fmin_hz),
      RXVC_DBL("fmax_hz", features.fmax_hz),
      RXVC_DBL("mel_floor", features.mel_floor),
      RXVC_DBL("f0_min_hz", features.f0_min_hz),
      RXVC_DBL("f0_max_hz", features.f0_max_hz),
      RXVC_DBL("voicing_threshold", features.voicing_threshold),
      RXVC_DBL("rms_threshold", features.rms_threshold),

      RXVC_INT("vocab_size", model.vocab_size),
      RXVC_INT("mel_dim", model.mel_dim),
      RXVC_INT("hidden", model.hidden),
      RXVC_INT("content_layers", model.content_layers),
      RXVC_INT("content_heads", model.content_heads),
      RXVC_INT("content_ffn", model.content_ffn),
      RXVC_INT("max_rel_offset", model.max_rel_offset),
      RXVC_INT("timbre_layers", model.timbre_layers),
      RXVC_INT("timbre_hidden", model.timbre_hidden),
      RXVC_INT("embed_dim", model.embed_dim),
      RXVC_INT("pitch_embed_dim", model.pitch_embed_dim),
      RXVC_INT("posterior_layers", model.posterior_layers),
      RXVC_INT("decoder_layers", model.decoder_layers),
      RXVC_INT("wavenet_kernel", model.wavenet_kernel),
      RXVC_INT("stride", model.stride),
      {"disc_windows",
       [](const RunConfig& c) {
         std::string s;
         for (size_t i = 0; i < c.model.disc_windows.size(); ++i)
           s += (i ? "," : "") + std::to_string(c.model.disc_windows[i]);
         return s;
       },
       [](RunConfig& c, const std::string& s) {
         std::vector<int> w;
         std::stringstream in(s);
         std::string item;
         while (std::getline(in, item, ','))
           w.push_back(ParseNumber<int>("disc_windows", item));
         if (w.empty())
           throw ParseError("config key 'disc_windows': empty list");
         c.model.disc_windows = w;
       }},
      RXVC_INT("disc_depth", model.disc_depth),
      RXVC_INT("disc_channels", model.disc_channels),
      RXVC_DBL("disc_dropout", model.disc_dropout),
      RXVC_DBL("leaky_slope", model.leaky_slope),

      RXVC_INT("batch_size", training.batch_size),
      RXVC_DBL("adam_beta1", training.adam_beta1),
      RXVC_DBL("adam_beta2", training.adam_beta2),
      RXVC_DBL("adam_eps", training.adam_eps),
      RXVC_DBL("base_lr", training.base_lr),
      RXVC_INT("warmup_steps", training.warmup_steps),
      RXVC_INT("n_refs", training.n_refs),
      {"ref_mode",
       [](const RunConfig& c) { return ToString(c.training.ref_mode); },
       [](RunConfig& c, const std::string& s) {
         try {
           c.training.ref_mode = ParseReferenceMode(s);
         } catch (const InvalidInput& e) {
           throw ParseError(std::string("config key 'ref_mode': ") + e.what());
         }
       }},
      RXVC_DBL("lambda_adv", training.lambda_adv),
      RXVC_DBL("lambda_ss", training.lambda_ss),
      RXVC_U64("seed", training.seed),
      RXVC_I64("steps", training.steps),
      RXVC_I64("checkpoint_every", training.checkpoint_every),

      RXVC_INT("griffin_lim_iters", griffin_lim_iters),
  };
  return fields;
}

#undef RXVC_INT
#undef RXVC_I64
#undef RXVC_U64
#undef RXVC_DBL

std::string Trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

}  // namespace

void RunConfig::Validate() const {
  model.Validate();
  training.Validate();
  auto need = [](bool ok, const std::string& what) {
    if (!ok) throw InvalidInput("config: " + what);
  };
  need(features.sample_rate > 0 && features.hop_samples > 0 &&
           features.win_samples >= features.hop_samples,
       "bad frame parameters");
  need(features.num_mels == model.mel_dim, "num_mels must equal mel_dim");
  need(features.fmin_hz >= 0.0 && features.fmax_hz > features.fmin_hz &&
           features.fmax_hz <= features.sample_rate / 2.0,
       "mel band edges must satisfy 0 <= fmin < fmax <= sample_rate / 2");
  need(features.mel_floor > 0.0, "mel_floor must be positive");
  need(features.f0_min_hz > 0.0 && features.f0_max_hz > features.f0_min_hz,
       "bad F0 range");
  need(griffin_lim_iters >= 0, "griffin_lim_iters must be >= 0");
}

RunConfig FullRunConfig() { return RunConfig{}; }

RunConfig ToyRunConfig() {
  RunConfig cfg;
  cfg.model = ToyModelConfig();
  cfg.training.warmup_steps = 200;
  cfg.training.batch_size = 4;
  cfg.training.lambda_adv = 0.1;
  return cfg;
}

RunConfig PresetRunConfig(const std::string& name) {
  if (name == "full" || name == "paper") return FullRunConfig();
  if (name == "toy") return ToyRunConfig();
  throw InvalidInput("unknown preset '" + name +
                     "' (expected full, paper or toy)");
}

void SetConfigValue(RunConfig& cfg, const std::string& key,
                    const std::string& value) {
  for (const auto& f : Fields()) {
    if (key == f.key) {
      f.set(cfg, value);
      return;
    }
  }
  throw ParseError("unknown config key '" + key + "'");
}

RunConfig ParseConfig(const std::string& text, const RunConfig& base) {
  RunConfig cfg = base;
  std::istringstream in(text);
  std::string line;
  int64_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = Trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw ParseError("expected 'key = value', got '" + line + "'", number);
    const std::string key = Trim(line.substr(0, eq));
    const std::string value = Trim(line.substr(eq + 1));
    if (key.empty()) throw ParseError("missing key before '='", number);
    try {
      SetConfigValue(cfg, key, value);
    } catch (const ParseError& e) {
      throw ParseError(e.what(), number);
    }
  }
  return cfg;
}

RunConfig LoadConfigFile(const std::string& path, const RunConfig& base) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open config file " + path);
  std::stringstream buf;
  buf << in.rdbuf();
  return ParseConfig(buf.str(), base);
}

std::string FormatConfig(const RunConfig& cfg) {
  std::string out;
  for (const auto& f : Fields())
    out += std::string(f.key) + " = " + f.get(cfg) + "\n";
  return out;
}

std::vector<std::string> ConfigKeys() {
  std::vector<std::string> keys;
  for (const auto& f : Fields()) keys.emplace_back(f.key);
  return keys;
}

}  // namespace rxvc

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

#include <charconv>
#include <fstream>
#include <sstream>

#include "rxvc/binary_io.h"
#include "rxvc/errors.h"
#include "rxvc/features.h"

namespace rxvc {
namespace {

constexpr char kMelMagic[] = "RXVCMEL1";
constexpr char kF0Magic[] = "RXVCF0_1";

bool ParseInt(std::string_view s, long long* out) {
  if (s.empty()) return false;
  const char* end = s.data() + s.size();
  auto [p, ec] = std::from_chars(s.data(), end, *out);
  return ec == std::errc() && p == end;
}

void WriteMatrix(const std::string& path, const char* magic,
                 const ag::RowMatrix& m) {
  bin::Writer w;
  w.PutBytes(std::string_view(magic, 8));
  w.Put<uint32_t>(static_cast<uint32_t>(m.rows()));
  w.Put<uint32_t>(static_cast<uint32_t>(m.cols()));
  for (Eigen::Index i = 0; i < m.size(); ++i)
    w.Put<float>(static_cast<float>(m.data()[i]));
  bin::WriteFile(path, w.data());
}

ag::RowMatrix ReadMatrix(const std::string& path, const char* magic) {
  const std::string bytes = bin::ReadFile(path);
  bin::Reader r(bytes, path);
  if (r.GetBytes(8) != std::string_view(magic, 8))
    throw ParseError(path + ": bad magic, expected " + magic);
  const uint32_t rows = r.Get<uint32_t>();
  const uint32_t cols = r.Get<uint32_t>();
  if (uint64_t(rows) * cols * 4 != r.remaining())
    throw ParseError(path + ": payload size does not match header");
  ag::RowMatrix m(rows, cols);
  for (Eigen::Index i = 0; i < m.size(); ++i) m.data()[i] = r.Get<float>();
  return m;
}

}  // namespace

std::map<std::string, TokenSequence> LoadTokenFile(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw InvalidInput("cannot open token file " + path);
  std::map<std::string, TokenSequence> out;
  std::string line;
  int64_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.find_first_not_of(" \t") == std::string::npos) continue;
    std::istringstream fields(line);
    std::string id, field;
    fields >> id;
    long long k = 0;
    if (!(fields >> field) || !ParseInt(field, &k) || k < 1)
      throw ParseError(path + ": missing or invalid vocabulary size", lineno);
    TokenSequence seq;
    seq.vocab_size = static_cast<int>(k);
    while (fields >> field) {
      long long tok = 0;
      if (!ParseInt(field, &tok))
        throw ParseError(path + ": malformed token '" + field + "'", lineno);
      if (tok < 0 || tok >= k)
        throw RangeError(path + ": token " + field + " outside [0, " +
                         std::to_string(k) + ") at line " +
                         std::to_string(lineno));
      seq.tokens.push_back(static_cast<int>(tok));
    }
    if (seq.tokens.empty())
      throw ParseError(path + ": utterance '" + id + "' has no tokens",
                       lineno);
    if (!out.emplace(id, std::move(seq)).second)
      throw ParseError(path + ": duplicate utterance id '" + id + "'", lineno);
  }
  return out;
}

void WriteTokenFile(const std::string& path,
                    const std::map<std::string, TokenSequence>& tokens) {
  std::ostringstream out;
  for (const auto& [id, seq] : tokens) {
    out << id << ' ' << seq.vocab_size;
    for (int t : seq.tokens) out << ' ' << t;
    out << '\n';
  }
  bin::WriteFile(path, out.str());
}

void CheckFrameAlignment(const TokenSequence& tokens,
                         const MelSpectrogram& mel, const std::string& id) {
  if (static_cast<int>(tokens.tokens.size()) != mel.num_frames())
    throw InvalidInput("utterance '" + id + "': " +
                       std::to_string(tokens.tokens.size()) +
                       " tokens for " + std::to_string(mel.num_frames()) +
                       " mel frames");
}

void WriteMelCache(const std::string& path, const MelSpectrogram& mel) {
  WriteMatrix(path, kMelMagic, mel.frames);
}

MelSpectrogram ReadMelCache(const std::string& path) {
  return MelSpectrogram{ReadMatrix(path, kMelMagic)};
}

void WriteF0Cache(const std::string& path, const PitchContour& f0) {
  ag::RowMatrix m(f0.f0_hz.size(), 2);
  for (size_t t = 0; t < f0.f0_hz.size(); ++t) {
    m(t, 0) = f0.f0_hz[t];
    m(t, 1) = f0.voiced[t] ? 1.0 : 0.0;
  }
  WriteMatrix(path, kF0Magic, m);
}

PitchContour ReadF0Cache(const std::string& path) {
  const ag::RowMatrix m = ReadMatrix(path, kF0Magic);
  if (m.cols() != 2) throw ParseError(path + ": F0 record must have 2 columns");
  PitchContour f0;
  for (Eigen::Index t = 0; t < m.rows(); ++t) {
    f0.f0_hz.push_back(m(t, 0));
    f0.voiced.push_back(m(t, 1) != 0.0);
  }
  return f0;
}

}  // namespace rxvc

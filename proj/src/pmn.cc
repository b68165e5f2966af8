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

#include "rxvc/pmn.h"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "rxvc/errors.h"

namespace rxvc {

using ag::Var;

ReferenceBank BuildReferenceBank(std::span<const ReferenceEncoding> refs) {
  if (refs.empty()) throw InvalidInput("build_reference_bank: no references");
  ReferenceBank bank;
  std::vector<Var> contents, locals;
  int offset = 0;
  for (size_t i = 0; i < refs.size(); ++i) {
    const auto& r = refs[i];
    if (r.content.rows() != r.local.rows())
      throw InvalidInput("build_reference_bank: reference " +
                         std::to_string(i) + " has " +
                         std::to_string(r.content.rows()) +
                         " content frames but " +
                         std::to_string(r.local.rows()) + " embedding frames");
    if (r.content.rows() == 0)
      throw InvalidInput("build_reference_bank: empty reference");
    bank.boundaries.push_back(offset);
    offset += r.content.rows();
    contents.push_back(r.content);
    locals.push_back(r.local);
  }
  bank.h_r = contents.size() == 1 ? contents[0] : ag::ConcatRows(contents);
  bank.s_l = locals.size() == 1 ? locals[0] : ag::ConcatRows(locals);
  return bank;
}

PronunciationMatcher::PronunciationMatcher(const ModelConfig& cfg, Rng& rng)
    : w_query_(nn::UniformParam(cfg.hidden, cfg.hidden, cfg.hidden, rng)),
      w_key_(nn::UniformParam(cfg.hidden, cfg.hidden, cfg.hidden, rng)) {}

PronunciationMatcher::PronunciationMatcher(Var w_query, Var w_key)
    : w_query_(std::move(w_query)), w_key_(std::move(w_key)) {}

FineGrainedTimbre PronunciationMatcher::Match(const Var& h_s,
                                              const ReferenceBank& bank) const {
  if (bank.size() == 0) throw InvalidInput("match_pronunciation: empty bank");
  const Var q = ag::MatMul(h_s, w_query_);
  const Var k = ag::MatMul(bank.h_r, w_key_);
  const double scale = 1.0 / std::sqrt(static_cast<double>(q.cols()));
  FineGrainedTimbre out;
  out.attn = ag::SoftmaxRows(ag::Scale(ag::MatMulNT(q, k), scale));
  out.f = ag::MatMul(out.attn, bank.s_l);
  return out;
}

void PronunciationMatcher::Collect(const std::string& prefix,
                                   nn::ParamList& out) const {
  out.push_back({prefix + ".w_query", w_query_});
  out.push_back({prefix + ".w_key", w_key_});
}

Var FuseSpeaker(const Var& f, const Var& s_g) {
  if (s_g.rows() != 1 || s_g.cols() != f.cols())
    throw InvalidInput("fuse_speaker: embedding dimension mismatch");
  return ag::AddRow(f, s_g);
}

double AlignmentDump::BlockMass(int b) const {
  if (b < 0 || b >= static_cast<int>(boundaries.size()))
    throw InvalidInput("AlignmentDump::BlockMass: no such block");
  const int start = boundaries[b];
  const int end = b + 1 < static_cast<int>(boundaries.size())
                      ? boundaries[b + 1]
                      : bank_frames;
  if (source_frames == 0) return 0.0;
  return weights.middleCols(start, end - start).rowwise().sum().mean();
}

void ExportAttention(const std::string& path, const ag::RowMatrix& attn,
                     std::span<const int> boundaries) {
  std::ofstream out(path);
  if (!out) throw WriteError("cannot open " + path + " for writing");
  out << "RXVCATT1 " << attn.rows() << ' ' << attn.cols() << ' '
      << boundaries.size();
  for (int b : boundaries) out << ' ' << b;
  out << '\n';
  char buf[32];
  for (Eigen::Index i = 0; i < attn.rows(); ++i) {
    for (Eigen::Index j = 0; j < attn.cols(); ++j) {
      std::snprintf(buf, sizeof(buf), "%.6g", attn(i, j));
      if (j) out << ' ';
      out << buf;
    }
    out << '\n';
  }
  out.flush();
  if (!out) throw WriteError("failed writing " + path);
}

AlignmentDump ReadAlignmentDump(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ParseError("cannot open alignment dump " + path);
  std::string line;
  if (!std::getline(in, line)) throw ParseError(path + ": empty file", 1);
  std::istringstream head(line);
  std::string magic;
  AlignmentDump dump;
  size_t n_refs = 0;
  if (!(head >> magic) || magic != "RXVCATT1")
    throw ParseError(path + ": missing RXVCATT1 header", 1);
  if (!(head >> dump.source_frames >> dump.bank_frames >> n_refs) ||
      dump.source_frames < 0 || dump.bank_frames < 1 || n_refs < 1)
    throw ParseError(path + ": bad header sizes", 1);
  for (size_t i = 0; i < n_refs; ++i) {
    int b;
    if (!(head >> b)) throw ParseError(path + ": missing boundary", 1);
    if ((i == 0 && b != 0) || (i > 0 && b <= dump.boundaries.back()) ||
        b >= dump.bank_frames)
      throw ParseError(path + ": boundaries must start at 0 and increase", 1);
    dump.boundaries.push_back(b);
  }
  std::string extra;
  if (head >> extra) throw ParseError(path + ": trailing header fields", 1);
  dump.weights.resize(dump.source_frames, dump.bank_frames);
  for (int i = 0; i < dump.source_frames; ++i) {
    if (!std::getline(in, line))
      throw ParseError(path + ": missing weight row", i + 2);
    std::istringstream row(line);
    for (int j = 0; j < dump.bank_frames; ++j) {
      if (!(row >> dump.weights(i, j)))
        throw ParseError(path + ": short weight row", i + 2);
    }
    if (row >> extra) throw ParseError(path + ": long weight row", i + 2);
  }
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos)
      throw ParseError(path + ": trailing content");
  return dump;
}

}  // namespace rxvc

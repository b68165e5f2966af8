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
#include <limits>
#include <vector>

#include "rxvc/errors.h"
#include "rxvc/features.h"
#include "rxvc/random.h"

namespace rxvc {
namespace {

constexpr int kMaxIterations = 100;
constexpr double kTolerance = 1e-6;

int CountDistinctRows(const ag::RowMatrix& x) {
  std::vector<int> order(x.rows());
  for (int i = 0; i < x.rows(); ++i) order[i] = i;
  auto less = [&](int a, int b) {
    for (int c = 0; c < x.cols(); ++c)
      if (x(a, c) != x(b, c)) return x(a, c) < x(b, c);
    return false;
  };
  std::sort(order.begin(), order.end(), less);
  int distinct = x.rows() > 0 ? 1 : 0;
  for (size_t i = 1; i < order.size(); ++i)
    if (less(order[i - 1], order[i])) ++distinct;
  return distinct;
}

// Index of the nearest centroid, lowest index on ties.
int Nearest(const ag::RowMatrix& centroids, const Eigen::RowVectorXd& frame,
            double* dist = nullptr) {
  int best = 0;
  double best_d = std::numeric_limits<double>::infinity();
  for (int k = 0; k < centroids.rows(); ++k) {
    const double d = (centroids.row(k) - frame).squaredNorm();
    if (d < best_d) {
      best_d = d;
      best = k;
    }
  }
  if (dist) *dist = best_d;
  return best;
}

}  // namespace

Tokenizer::Tokenizer(ag::RowMatrix centroids)
    : centroids_(std::move(centroids)) {
  if (centroids_.rows() < 2)
    throw InvalidInput("tokenizer needs at least 2 centroids");
  if (!centroids_.allFinite())
    throw InvalidInput("tokenizer centroids must be finite");
}

Tokenizer Tokenizer::Fit(std::span<const MelSpectrogram> mels, int k,
                         uint64_t seed) {
  if (k < 2) throw InvalidInput("fit_tokenizer: k must be >= 2");
  int total = 0, dim = -1;
  for (const auto& m : mels) {
    if (dim >= 0 && m.num_mels() != dim)
      throw InvalidInput("fit_tokenizer: inconsistent mel dimension");
    dim = m.num_mels();
    total += m.num_frames();
  }
  if (total < k)
    throw DegenerateCorpus("fit_tokenizer: " + std::to_string(total) +
                           " frames for k = " + std::to_string(k));
  ag::RowMatrix x(total, dim);
  int row = 0;
  for (const auto& m : mels) {
    x.middleRows(row, m.num_frames()) = m.frames;
    row += m.num_frames();
  }
  const int distinct = CountDistinctRows(x);
  if (distinct < k)
    throw DegenerateCorpus("fit_tokenizer: only " + std::to_string(distinct) +
                           " distinct frames for k = " + std::to_string(k));

  // k-means++ seeding
  Rng rng = StreamRng(seed, 0x6b6d65616e73ULL);
  ag::RowMatrix c(k, dim);
  c.row(0) = x.row(UniformInt(rng, 0, total - 1));
  std::vector<double> d2(total);
  for (int i = 0; i < total; ++i) d2[i] = (x.row(i) - c.row(0)).squaredNorm();
  for (int j = 1; j < k; ++j) {
    double sum = 0.0;
    for (double v : d2) sum += v;
    int pick = total - 1;
    const double target = UniformReal(rng) * sum;
    double acc = 0.0;
    for (int i = 0; i < total; ++i) {
      acc += d2[i];
      if (d2[i] > 0.0 && acc > target) {
        pick = i;
        break;
      }
    }
    if (d2[pick] == 0.0) {
      // Floating-point slack at the tail: take the farthest frame instead.
      pick = static_cast<int>(std::max_element(d2.begin(), d2.end()) -
                              d2.begin());
    }
    c.row(j) = x.row(pick);
    for (int i = 0; i < total; ++i)
      d2[i] = std::min(d2[i], (x.row(i) - c.row(j)).squaredNorm());
  }

  std::vector<int> assign(total, 0);
  std::vector<double> dist(total, 0.0);
  for (int iter = 0; iter < kMaxIterations; ++iter) {
    for (int i = 0; i < total; ++i)
      assign[i] = Nearest(c, x.row(i), &dist[i]);
    ag::RowMatrix next = ag::RowMatrix::Zero(k, dim);
    std::vector<int> counts(k, 0);
    for (int i = 0; i < total; ++i) {
      next.row(assign[i]) += x.row(i);
      ++counts[assign[i]];
    }
    std::vector<bool> taken(total, false);
    for (int j = 0; j < k; ++j) {
      if (counts[j] > 0) {
        next.row(j) /= counts[j];
        continue;
      }
      // Empty cluster: move it to the worst-served frame.
      int far = -1;
      for (int i = 0; i < total; ++i)
        if (!taken[i] && (far < 0 || dist[i] > dist[far])) far = i;
      taken[far] = true;
      dist[far] = 0.0;
      next.row(j) = x.row(far);
    }
    double shift = 0.0;
    for (int j = 0; j < k; ++j)
      shift = std::max(shift, (next.row(j) - c.row(j)).norm());
    c = std::move(next);
    if (shift <= kTolerance) break;
  }
  return Tokenizer(std::move(c));
}

TokenSequence Tokenizer::Tokenize(const MelSpectrogram& mel) const {
  if (empty()) throw InvalidInput("tokenize: tokenizer not fitted");
  if (mel.num_mels() != dim())
    throw InvalidInput("tokenize: mel dimension does not match tokenizer");
  TokenSequence seq;
  seq.vocab_size = vocab_size();
  seq.tokens.resize(mel.num_frames());
  for (int t = 0; t < mel.num_frames(); ++t)
    seq.tokens[t] = Nearest(centroids_, mel.frames.row(t));
  return seq;
}

}  // namespace rxvc

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

#ifndef RXVC_FEATURES_H_
#define RXVC_FEATURES_H_

#include <cstdint>
#include <map>
#include <span>
#include <string>
#include <vector>

#include "rxvc/autograd.h"

namespace rxvc {

// Front-end parameters. Only the 16 kHz, 20 ms hop / 64 ms window, 80-band
// configuration is exercised; the fields exist so the config file can name
// them.
struct FeatureConfig {
  int sample_rate = 16000;
  int hop_samples = 320;
  int win_samples = 1024;
  int num_mels = 80;
  double fmin_hz = 0.0;
  double fmax_hz = 8000.0;
  double mel_floor = 1e-5;
  double f0_min_hz = 50.0;
  double f0_max_hz = 600.0;
  double voicing_threshold = 0.3;
  double rms_threshold = 1e-4;

  double LogFloor() const;
  int NumFrames(size_t num_samples) const;
};

struct MelSpectrogram {
  ag::RowMatrix frames;  // [T x num_mels], natural-log energies

  int num_frames() const { return static_cast<int>(frames.rows()); }
  int num_mels() const { return static_cast<int>(frames.cols()); }
};

struct TokenSequence {
  std::vector<int> tokens;
  int vocab_size = 0;
};

struct PitchContour {
  std::vector<double> f0_hz;  // 0 where unvoiced
  std::vector<bool> voiced;
};

struct NormalizedPitch {
  std::vector<double> values;  // 0 where unvoiced
  std::vector<bool> voiced;
};

// Hz <-> mel on the HTK scale.
double HzToMel(double hz);
double MelToHz(double mel);

// Triangular filterbank [num_mels x num_bins], peak height 1, filters
// evenly spaced on the mel scale between fmin and fmax.
ag::RowMatrix MelFilterbank(const FeatureConfig& cfg);
// Center frequencies (Hz) of the mel filters, plus the two outer edges:
// num_mels + 2 points.
std::vector<double> MelBandEdges(const FeatureConfig& cfg);

MelSpectrogram ComputeMel(std::span<const double> waveform, int sample_rate,
                          const FeatureConfig& cfg = {});

PitchContour ExtractF0(std::span<const double> waveform,
                       const FeatureConfig& cfg = {});

NormalizedPitch NormalizePitch(const PitchContour& contour);
// Z-scores values already in the log domain over the voiced frames.
NormalizedPitch NormalizeLogPitch(std::span<const double> log_f0,
                                  const std::vector<bool>& voiced);

// Discrete content units: k-means codebook over mel frames.
class Tokenizer {
 public:
  Tokenizer() = default;
  explicit Tokenizer(ag::RowMatrix centroids);

  // k-means++ initialization from a seeded stream, at most 100 Lloyd
  // iterations, stopping once no centroid moves more than 1e-6.
  static Tokenizer Fit(std::span<const MelSpectrogram> mels, int k,
                       uint64_t seed);

  // Nearest centroid per frame; ties go to the lowest index.
  TokenSequence Tokenize(const MelSpectrogram& mel) const;

  int vocab_size() const { return static_cast<int>(centroids_.rows()); }
  int dim() const { return static_cast<int>(centroids_.cols()); }
  const ag::RowMatrix& centroids() const { return centroids_; }
  bool empty() const { return centroids_.size() == 0; }

 private:
  ag::RowMatrix centroids_;
};

// Token file: one line per utterance, "<utt_id> <K> <t0> <t1> ...".
std::map<std::string, TokenSequence> LoadTokenFile(const std::string& path);
void WriteTokenFile(const std::string& path,
                    const std::map<std::string, TokenSequence>& tokens);

// Throws InvalidInput unless tokens has exactly one entry per mel frame.
void CheckFrameAlignment(const TokenSequence& tokens,
                         const MelSpectrogram& mel, const std::string& id);

// Feature cache records: magic, uint32 rows, uint32 cols, then row-major
// little-endian float32 values. Mel uses "RXVCMEL1" with cols = num_mels;
// F0 uses "RXVCF0_1" with cols = 2 (f0_hz, voiced flag 0/1).
void WriteMelCache(const std::string& path, const MelSpectrogram& mel);
MelSpectrogram ReadMelCache(const std::string& path);
void WriteF0Cache(const std::string& path, const PitchContour& f0);
PitchContour ReadF0Cache(const std::string& path);

}  // namespace rxvc

#endif  // RXVC_FEATURES_H_

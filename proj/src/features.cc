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

#include "rxvc/errors.h"
#include "rxvc/features.h"
#include "rxvc/stft.h"

namespace rxvc {

double FeatureConfig::LogFloor() const { return std::log(mel_floor); }

int FeatureConfig::NumFrames(size_t num_samples) const {
  return static_cast<int>(num_samples / hop_samples) + 1;
}

double HzToMel(double hz) { return 2595.0 * std::log10(1.0 + hz / 700.0); }

double MelToHz(double mel) {
  return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0);
}

std::vector<double> MelBandEdges(const FeatureConfig& cfg) {
  const double lo = HzToMel(cfg.fmin_hz), hi = HzToMel(cfg.fmax_hz);
  std::vector<double> edges(cfg.num_mels + 2);
  for (int i = 0; i < cfg.num_mels + 2; ++i)
    edges[i] = MelToHz(lo + (hi - lo) * i / (cfg.num_mels + 1));
  return edges;
}

ag::RowMatrix MelFilterbank(const FeatureConfig& cfg) {
  const int bins = cfg.win_samples / 2 + 1;
  const auto edges = MelBandEdges(cfg);
  ag::RowMatrix fb = ag::RowMatrix::Zero(cfg.num_mels, bins);
  for (int m = 0; m < cfg.num_mels; ++m) {
    const double left = edges[m], center = edges[m + 1], right = edges[m + 2];
    for (int k = 0; k < bins; ++k) {
      const double f = double(k) * cfg.sample_rate / cfg.win_samples;
      if (f > left && f < center)
        fb(m, k) = (f - left) / (center - left);
      else if (f >= center && f < right)
        fb(m, k) = (right - f) / (right - center);
    }
  }
  return fb;
}

MelSpectrogram ComputeMel(std::span<const double> waveform, int sample_rate,
                          const FeatureConfig& cfg) {
  if (waveform.empty()) throw InvalidInput("compute_mel: empty waveform");
  if (sample_rate != cfg.sample_rate)
    throw InvalidInput("compute_mel: expected " +
                       std::to_string(cfg.sample_rate) + " Hz audio, got " +
                       std::to_string(sample_rate));
  for (double s : waveform)
    if (!std::isfinite(s))
      throw InvalidInput("compute_mel: non-finite sample");
  const Stft stft(cfg.win_samples, cfg.hop_samples);
  const ag::RowMatrix mag = stft.Magnitude(waveform);
  MelSpectrogram mel;
  mel.frames = mag * MelFilterbank(cfg).transpose();
  mel.frames = mel.frames.array().max(cfg.mel_floor).log().matrix();
  return mel;
}

PitchContour ExtractF0(std::span<const double> x, const FeatureConfig& cfg) {
  if (x.empty()) throw InvalidInput("extract_f0: empty waveform");
  const int frames = cfg.NumFrames(x.size());
  const int win = cfg.win_samples;
  const int min_lag =
      static_cast<int>(std::ceil(cfg.sample_rate / cfg.f0_max_hz));
  const int max_lag =
      static_cast<int>(std::floor(cfg.sample_rate / cfg.f0_min_hz));
  const long n = static_cast<long>(x.size());

  PitchContour out;
  out.f0_hz.assign(frames, 0.0);
  out.voiced.assign(frames, false);
  std::vector<double> w(win);
  // r[lag] for lag in [min_lag - 1, max_lag + 1]
  std::vector<double> r(max_lag + 2, 0.0);
  for (int t = 0; t < frames; ++t) {
    const long start = static_cast<long>(t) * cfg.hop_samples - win / 2;
    double mean = 0.0;
    for (int i = 0; i < win; ++i) {
      const long j = start + i;
      w[i] = (j >= 0 && j < n) ? x[j] : 0.0;
      mean += w[i];
    }
    mean /= win;
    double energy = 0.0;
    for (double& v : w) {
      v -= mean;
      energy += v * v;
    }
    const double rms = std::sqrt(energy / win);
    if (rms < cfg.rms_threshold) continue;

    double best = -1.0;
    for (int lag = min_lag - 1; lag <= max_lag + 1 && lag < win; ++lag) {
      double num = 0.0, e0 = 0.0, e1 = 0.0;
      for (int i = 0; i + lag < win; ++i) {
        num += w[i] * w[i + lag];
        e0 += w[i] * w[i];
        e1 += w[i + lag] * w[i + lag];
      }
      const double den = std::sqrt(e0 * e1);
      r[lag] = den > 0.0 ? num / den : 0.0;
      if (lag >= min_lag && lag <= max_lag) best = std::max(best, r[lag]);
    }
    if (best < cfg.voicing_threshold) continue;
    // Shortest local-maximum lag close to the global peak; avoids octave
    // errors at multiples of the period.
    int pick = -1;
    for (int lag = min_lag; lag <= max_lag; ++lag) {
      if (r[lag] >= 0.9 * best && r[lag] >= r[lag - 1] &&
          r[lag] >= r[lag + 1]) {
        pick = lag;
        break;
      }
    }
    if (pick < 0 || r[pick] < cfg.voicing_threshold) continue;
    double lag = pick;
    const double a = r[pick - 1], b = r[pick], c = r[pick + 1];
    const double denom = a - 2.0 * b + c;
    if (denom < 0.0) lag += std::clamp(0.5 * (a - c) / denom, -0.5, 0.5);
    const double f0 = std::clamp(cfg.sample_rate / lag, cfg.f0_min_hz,
                                 cfg.f0_max_hz);
    out.f0_hz[t] = f0;
    out.voiced[t] = true;
  }
  return out;
}

NormalizedPitch NormalizeLogPitch(std::span<const double> log_f0,
                                  const std::vector<bool>& voiced) {
  if (log_f0.size() != voiced.size())
    throw InvalidInput("normalize_pitch: value/voicing length mismatch");
  NormalizedPitch out;
  out.values.assign(log_f0.size(), 0.0);
  out.voiced = voiced;
  double sum = 0.0;
  size_t count = 0;
  for (size_t t = 0; t < log_f0.size(); ++t) {
    if (!voiced[t]) continue;
    sum += log_f0[t];
    ++count;
  }
  if (count == 0) return out;
  double mean = sum / count;
  // One correction pass so constant inputs give an exact mean.
  double corr = 0.0;
  for (size_t t = 0; t < log_f0.size(); ++t)
    if (voiced[t]) corr += log_f0[t] - mean;
  mean += corr / count;
  double var = 0.0;
  for (size_t t = 0; t < log_f0.size(); ++t)
    if (voiced[t]) var += (log_f0[t] - mean) * (log_f0[t] - mean);
  const double sd = std::max(std::sqrt(var / count), 1e-8);
  for (size_t t = 0; t < log_f0.size(); ++t)
    if (voiced[t]) out.values[t] = (log_f0[t] - mean) / sd;
  return out;
}

NormalizedPitch NormalizePitch(const PitchContour& contour) {
  if (contour.f0_hz.size() != contour.voiced.size())
    throw InvalidInput("normalize_pitch: contour length mismatch");
  std::vector<double> logs(contour.f0_hz.size(), 0.0);
  for (size_t t = 0; t < logs.size(); ++t) {
    if (!contour.voiced[t]) continue;
    if (!(contour.f0_hz[t] > 0.0))
      throw InvalidInput("normalize_pitch: voiced frame with F0 <= 0");
    logs[t] = std::log(contour.f0_hz[t]);
  }
  return NormalizeLogPitch(logs, contour.voiced);
}

}  // namespace rxvc

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

#ifndef RXVC_STFT_H_
#define RXVC_STFT_H_

#include <complex>
#include <span>
#include <vector>

#include "rxvc/autograd.h"

namespace rxvc {

// Short-time Fourier transform with a periodic Hann window and zero center
// padding of n_fft/2 on each side, so frame t is centered at t*hop and
// num_frames = floor(num_samples / hop) + 1.
class Stft {
 public:
  Stft(int n_fft, int hop);

  int n_fft() const { return n_fft_; }
  int hop() const { return hop_; }
  int num_bins() const { return n_fft_ / 2 + 1; }
  int NumFrames(size_t num_samples) const;

  // Complex spectrum, frame-major: result[t * num_bins + k].
  std::vector<std::complex<double>> Forward(std::span<const double> x) const;
  // Magnitude [T x num_bins].
  ag::RowMatrix Magnitude(std::span<const double> x) const;
  // Weighted overlap-add inverse producing num_samples samples.
  std::vector<double> Inverse(std::span<const std::complex<double>> spec,
                              int num_frames, size_t num_samples) const;

 private:
  int n_fft_;
  int hop_;
  std::vector<double> window_;
};

}  // namespace rxvc

#endif  // RXVC_STFT_H_

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

#include "rxvc/stft.h"

#include <fftw3.h>

#include <cmath>
#include <memory>
#include <mutex>
#include <numbers>

#include "rxvc/errors.h"

namespace rxvc {
namespace {

// FFTW planning is not thread-safe; execution of distinct plans is.
std::mutex& PlannerMutex() {
  static std::mutex m;
  return m;
}

template <typename T>
struct FftwBuffer {
  explicit FftwBuffer(size_t n)
      : ptr(static_cast<T*>(fftw_malloc(sizeof(T) * n))) {
    if (!ptr) throw std::bad_alloc();
  }
  ~FftwBuffer() { fftw_free(ptr); }
  FftwBuffer(const FftwBuffer&) = delete;
  FftwBuffer& operator=(const FftwBuffer&) = delete;
  T* ptr;
};

class Plan {
 public:
  explicit Plan(fftw_plan p) : plan_(p) {}
  ~Plan() {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    fftw_destroy_plan(plan_);
  }
  Plan(const Plan&) = delete;
  Plan& operator=(const Plan&) = delete;
  void Execute() const { fftw_execute(plan_); }

 private:
  fftw_plan plan_;
};

}  // namespace

Stft::Stft(int n_fft, int hop) : n_fft_(n_fft), hop_(hop), window_(n_fft) {
  if (n_fft <= 0 || hop <= 0) throw InvalidInput("Stft: bad sizes");
  for (int i = 0; i < n_fft; ++i)
    window_[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n_fft);
}

int Stft::NumFrames(size_t num_samples) const {
  return static_cast<int>(num_samples / hop_) + 1;
}

std::vector<std::complex<double>> Stft::Forward(
    std::span<const double> x) const {
  const int frames = NumFrames(x.size());
  const int bins = num_bins();
  const long n = static_cast<long>(x.size());
  FftwBuffer<double> in(n_fft_);
  FftwBuffer<fftw_complex> out(bins);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_r2c_1d(n_fft_, in.ptr, out.ptr, FFTW_ESTIMATE));
  }
  std::vector<std::complex<double>> spec(size_t(frames) * bins);
  for (int t = 0; t < frames; ++t) {
    const long start = static_cast<long>(t) * hop_ - n_fft_ / 2;
    for (int i = 0; i < n_fft_; ++i) {
      const long j = start + i;
      in.ptr[i] = (j >= 0 && j < n) ? x[j] * window_[i] : 0.0;
    }
    plan->Execute();
    for (int k = 0; k < bins; ++k)
      spec[size_t(t) * bins + k] = {out.ptr[k][0], out.ptr[k][1]};
  }
  return spec;
}

ag::RowMatrix Stft::Magnitude(std::span<const double> x) const {
  const auto spec = Forward(x);
  const int frames = NumFrames(x.size());
  ag::RowMatrix mag(frames, num_bins());
  for (int t = 0; t < frames; ++t)
    for (int k = 0; k < num_bins(); ++k)
      mag(t, k) = std::abs(spec[size_t(t) * num_bins() + k]);
  return mag;
}

std::vector<double> Stft::Inverse(std::span<const std::complex<double>> spec,
                                  int num_frames, size_t num_samples) const {
  const int bins = num_bins();
  if (spec.size() != size_t(num_frames) * bins)
    throw InvalidInput("Stft::Inverse: spectrum size mismatch");
  FftwBuffer<fftw_complex> in(bins);
  FftwBuffer<double> out(n_fft_);
  std::unique_ptr<Plan> plan;
  {
    std::lock_guard<std::mutex> lock(PlannerMutex());
    plan = std::make_unique<Plan>(
        fftw_plan_dft_c2r_1d(n_fft_, in.ptr, out.ptr, FFTW_ESTIMATE));
  }
  const long n = static_cast<long>(num_samples);
  std::vector<double> y(num_samples, 0.0), norm(num_samples, 0.0);
  for (int t = 0; t < num_frames; ++t) {
    for (int k = 0; k < bins; ++k) {
      in.ptr[k][0] = spec[size_t(t) * bins + k].real();
      in.ptr[k][1] = spec[size_t(t) * bins + k].imag();
    }
    plan->Execute();
    const long start = static_cast<long>(t) * hop_ - n_fft_ / 2;
    for (int i = 0; i < n_fft_; ++i) {
      const long j = start + i;
      if (j < 0 || j >= n) continue;
      y[j] += out.ptr[i] / n_fft_ * window_[i];
      norm[j] += window_[i] * window_[i];
    }
  }
  for (size_t j = 0; j < num_samples; ++j)
    if (norm[j] > 1e-8) y[j] /= norm[j];
  return y;
}

}  // namespace rxvc

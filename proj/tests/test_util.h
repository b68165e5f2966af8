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

// Shared helpers for the unit tests: random tensors and a central
// finite-difference gradient oracle independent of the autograd engine.

#ifndef RXVC_TESTS_TEST_UTIL_H_
#define RXVC_TESTS_TEST_UTIL_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <vector>

#include "rxvc/autograd.h"
#include "rxvc/random.h"

namespace rxvc::testing {

inline std::vector<double> RandomValues(size_t n, Rng& rng,
                                        double scale = 1.0) {
  std::vector<double> v(n);
  for (double& x : v) x = scale * Normal(rng);
  return v;
}

inline ag::Var RandomParam(int rows, int cols, Rng& rng, double scale = 1.0) {
  return ag::Var::Parameter(rows, cols,
                            RandomValues(size_t(rows) * cols, rng, scale));
}

inline ag::Var RandomConst(int rows, int cols, Rng& rng, double scale = 1.0) {
  return ag::Var::Constant(rows, cols,
                           RandomValues(size_t(rows) * cols, rng, scale));
}

// Largest relative error between the analytic gradient of loss_fn with
// respect to param and central finite differences.
inline double MaxRelGradError(const std::function<ag::Var()>& loss_fn,
                              ag::Var param, double h = 1e-6) {
  param.ZeroGrad();
  ag::Backward(loss_fn());
  std::vector<double> analytic(param.grad().begin(), param.grad().end());
  if (analytic.empty()) analytic.assign(param.size(), 0.0);
  double worst = 0.0;
  auto values = param.mutable_values();
  for (size_t i = 0; i < values.size(); ++i) {
    const double saved = values[i];
    double plus, minus;
    {
      ag::NoGradGuard guard;
      values[i] = saved + h;
      plus = loss_fn().item();
      values[i] = saved - h;
      minus = loss_fn().item();
    }
    values[i] = saved;
    const double numeric = (plus - minus) / (2.0 * h);
    const double denom =
        std::max({std::abs(numeric), std::abs(analytic[i]), 1e-4});
    worst = std::max(worst, std::abs(numeric - analytic[i]) / denom);
  }
  param.ZeroGrad();
  return worst;
}

}  // namespace rxvc::testing

#endif  // RXVC_TESTS_TEST_UTIL_H_

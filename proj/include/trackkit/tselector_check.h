/* Copyright 2026 The trackkit Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/

// Finite-difference diagnostic for the token selector, used by the
// check-tselector command.

#ifndef TRACKKIT_TSELECTOR_CHECK_H_
#define TRACKKIT_TSELECTOR_CHECK_H_

#include <cstddef>
#include <cstdint>

#include "trackkit/tselector.h"

namespace trackkit::tselector {

struct GradCheckOptions {
  double epsilon = 1e-5;
  // Denominator floor for relative error, so entries whose true gradient is
  // ~0 are judged by absolute error.
  double relative_floor = 1e-6;
  // 0 checks every coordinate; otherwise a seeded random subset of this size.
  std::size_t max_samples = 0;
  std::uint64_t seed = 0;
};

struct GradCheckReport {
  std::size_t checked = 0;
  double max_relative_error = 0.0;
  double max_abs_gate_gradient = 0.0;
  // Gap between the k-th and (k+1)-th largest scores; a perturbation smaller
  // than this cannot change the selected set.
  double score_gap = 0.0;
};

// Loss = sum of all outputs; compares Backward with central differences over
// tokens and every parameter tensor.
GradCheckReport CheckGradients(const Matrix<double>& tokens,
                               const SelectorParams<double>& params,
                               const GradCheckOptions& options = {});

double ScoreGap(const Vector<double>& scores, int k);

}  // namespace trackkit::tselector

#endif  // TRACKKIT_TSELECTOR_CHECK_H_

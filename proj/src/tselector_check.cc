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

#include "trackkit/tselector_check.h"

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <random>
#include <vector>

namespace trackkit::tselector {
namespace {

struct Coordinate {
  double* value;
  double analytic;
};

}  // namespace

double ScoreGap(const Vector<double>& scores, int k) {
  if (k >= scores.size()) return std::numeric_limits<double>::infinity();
  std::vector<double> sorted(scores.data(), scores.data() + scores.size());
  std::sort(sorted.begin(), sorted.end(), std::greater<>());
  return sorted[k - 1] - sorted[k];
}

GradCheckReport CheckGradients(const Matrix<double>& tokens,
                               const SelectorParams<double>& params,
                               const GradCheckOptions& options) {
  Matrix<double> f = tokens;
  SelectorParams<double> p = params;
  const Matrix<double> ones = Matrix<double>::Ones(p.k, p.out_dim());
  const Gradients<double> g = Backward(f, p, ones);

  GradCheckReport report;
  report.score_gap = ScoreGap(GateScores(f, p), p.k);
  report.max_abs_gate_gradient =
      std::max({g.gate_w1.cwiseAbs().maxCoeff(), g.gate_b1.cwiseAbs().maxCoeff(),
                g.gate_w2.cwiseAbs().maxCoeff(), std::abs(g.gate_b2)});

  std::vector<Coordinate> coords;
  auto collect = [&](auto& value, const auto& grad) {
    for (Eigen::Index i = 0; i < value.size(); ++i) {
      coords.push_back({value.data() + i, grad.data()[i]});
    }
  };
  collect(f, g.tokens);
  collect(p.gate_w1, g.gate_w1);
  collect(p.gate_b1, g.gate_b1);
  collect(p.gate_w2, g.gate_w2);
  coords.push_back({&p.gate_b2, g.gate_b2});
  collect(p.proj_w1, g.proj_w1);
  collect(p.proj_b1, g.proj_b1);
  collect(p.proj_w2, g.proj_w2);
  collect(p.proj_b2, g.proj_b2);

  if (options.max_samples > 0 && options.max_samples < coords.size()) {
    std::mt19937_64 rng(options.seed);
    std::shuffle(coords.begin(), coords.end(), rng);
    coords.resize(options.max_samples);
  }

  for (const Coordinate& c : coords) {
    const double saved = *c.value;
    *c.value = saved + options.epsilon;
    const double plus = Forward(f, p).output.sum();
    *c.value = saved - options.epsilon;
    const double minus = Forward(f, p).output.sum();
    *c.value = saved;
    const double numeric = (plus - minus) / (2.0 * options.epsilon);
    const double denom = std::max(
        {std::abs(numeric), std::abs(c.analytic), options.relative_floor});
    report.max_relative_error =
        std::max(report.max_relative_error, std::abs(numeric - c.analytic) / denom);
    ++report.checked;
  }
  return report;
}

}  // namespace trackkit::tselector

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

// Row-by-row gate scoring, brute-force top-k and a central-difference
// gradient oracle for the token selector.

#ifndef TRACKKIT_TESTS_ORACLES_TSELECTOR_ORACLE_H_
#define TRACKKIT_TESTS_ORACLES_TSELECTOR_ORACLE_H_

#include <algorithm>
#include <cmath>
#include <functional>
#include <utility>
#include <vector>

#include "trackkit/tselector.h"

namespace oracle {

using trackkit::tselector::Matrix;
using trackkit::tselector::SelectorParams;
using trackkit::tselector::Vector;

inline double Gelu(double x) { return 0.5 * x * (1.0 + std::erf(x / std::sqrt(2.0))); }

inline std::vector<double> GateScoresByRow(const Matrix<double>& F,
                                           const SelectorParams<double>& p) {
  const int n = static_cast<int>(F.rows());
  const int c = static_cast<int>(F.cols());
  const int h = static_cast<int>(p.hidden());
  std::vector<double> logits(n);
  for (int t = 0; t < n; ++t) {
    double logit = p.gate_b2;
    for (int u = 0; u < h; ++u) {
      double pre = p.gate_b1(u);
      for (int ch = 0; ch < c; ++ch) pre += F(t, ch) * p.gate_w1(ch, u);
      const double act =
          p.gate_activation == trackkit::tselector::Activation::kGelu ? Gelu(pre) : pre;
      logit += act * p.gate_w2(u);
    }
    logits[t] = logit;
  }
  const double mx = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double& l : logits) z += (l = std::exp(l - mx));
  for (double& l : logits) l /= z;
  return logits;
}

inline std::vector<long> BruteTopK(const std::vector<double>& scores, int k) {
  std::vector<std::pair<double, long>> all;
  for (std::size_t i = 0; i < scores.size(); ++i) all.emplace_back(-scores[i], long(i));
  std::sort(all.begin(), all.end());
  std::vector<long> out;
  for (int i = 0; i < k; ++i) out.push_back(all[i].second);
  std::sort(out.begin(), out.end());
  return out;
}

// Perturbs each scalar of `x` in place and differences `loss`.
inline std::vector<double> CentralDifferences(double* x, std::size_t size,
                                              const std::function<double()>& loss,
                                              double eps) {
  std::vector<double> g(size);
  for (std::size_t i = 0; i < size; ++i) {
    const double saved = x[i];
    x[i] = saved + eps;
    const double up = loss();
    x[i] = saved - eps;
    const double down = loss();
    x[i] = saved;
    g[i] = (up - down) / (2 * eps);
  }
  return g;
}

}  // namespace oracle

#endif  // TRACKKIT_TESTS_ORACLES_TSELECTOR_ORACLE_H_

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

// Direct-from-the-formula CIDEr-D and METEOR-lite, written independently of
// src/text_metrics.cc (string-keyed n-grams, separate tokenizer).

#ifndef TRACKKIT_TESTS_ORACLES_TEXT_ORACLE_H_
#define TRACKKIT_TESTS_ORACLES_TEXT_ORACLE_H_

#include <algorithm>
#include <cctype>
#include <cmath>
#include <set>
#include <sstream>
#include <string>
#include <unordered_map>
#include <vector>

#include "trackkit/text_metrics.h"

namespace oracle {

inline std::vector<std::string> Words(const std::string& s) {
  std::string cleaned;
  for (unsigned char ch : s) {
    if (std::ispunct(ch)) continue;
    cleaned += static_cast<char>(std::tolower(ch));
  }
  std::istringstream is(cleaned);
  std::vector<std::string> out;
  for (std::string w; is >> w;) out.push_back(w);
  return out;
}

using Grams = std::unordered_map<std::string, double>;

inline Grams NGrams(const std::vector<std::string>& w, int n) {
  Grams g;
  for (std::size_t i = 0; i + n <= w.size(); ++i) {
    std::string key;
    for (int j = 0; j < n; ++j) key += (j ? " " : "") + w[i + j];
    g[key] += 1;
  }
  return g;
}

inline std::vector<double> CiderD(const std::vector<std::string>& cands,
                                  const std::vector<std::vector<std::string>>& refs) {
  const double N = static_cast<double>(cands.size());
  std::vector<double> scores(cands.size(), 0.0);
  for (int n = 1; n <= 4; ++n) {
    std::unordered_map<std::string, double> df;
    for (const auto& rs : refs) {
      std::set<std::string> present;
      for (const auto& r : rs)
        for (const auto& [k, v] : NGrams(Words(r), n)) present.insert(k);
      for (const auto& k : present) df[k] += 1;
    }
    auto tfidf = [&](const Grams& g) {
      Grams out;
      for (const auto& [k, tf] : g) {
        const double d = df.count(k) ? df.at(k) : 0.0;
        out[k] = tf * (std::log(N) - std::log(std::max(1.0, d)));
      }
      return out;
    };
    auto norm = [](const Grams& g) {
      double s = 0;
      for (const auto& [k, v] : g) s += v * v;
      return std::sqrt(s);
    };
    for (std::size_t i = 0; i < cands.size(); ++i) {
      const auto cw = Words(cands[i]);
      const Grams hv = tfidf(NGrams(cw, n));
      double acc = 0.0;
      for (const auto& r : refs[i]) {
        const auto rw = Words(r);
        const Grams rv = tfidf(NGrams(rw, n));
        double dot = 0.0;
        for (const auto& [k, v] : hv) {
          auto it = rv.find(k);
          if (it != rv.end()) dot += std::min(v, it->second) * it->second;
        }
        const double nh = norm(hv), nr = norm(rv);
        if (nh != 0 && nr != 0) dot /= nh * nr;
        const double delta = double(cw.size()) - double(rw.size());
        dot *= std::exp(-delta * delta / 72.0);
        acc += dot;
      }
      scores[i] += acc / refs[i].size() / 4.0 * 10.0;
    }
  }
  return scores;
}

inline double MeteorPair(const std::string& cand, const std::string& ref) {
  const auto c = Words(cand), r = Words(ref);
  if (c.empty() || r.empty()) return 0.0;
  std::vector<int> map(c.size(), -1);
  std::vector<char> taken(r.size(), 0);
  for (int pass = 0; pass < 2; ++pass) {
    for (std::size_t i = 0; i < c.size(); ++i) {
      if (map[i] >= 0) continue;
      for (std::size_t j = 0; j < r.size(); ++j) {
        const bool eq = pass == 0 ? c[i] == r[j]
                                  : trackkit::metrics::Stem(c[i]) ==
                                        trackkit::metrics::Stem(r[j]);
        if (!taken[j] && eq) {
          map[i] = static_cast<int>(j);
          taken[j] = 1;
          break;
        }
      }
    }
  }
  double m = 0, chunks = 0;
  for (std::size_t i = 0; i < c.size(); ++i) {
    if (map[i] < 0) continue;
    m += 1;
    const bool continues = i > 0 && map[i - 1] >= 0 && map[i] == map[i - 1] + 1;
    if (!continues) chunks += 1;
  }
  if (m == 0) return 0.0;
  const double P = m / c.size(), R = m / r.size();
  const double F = 10 * P * R / (R + 9 * P);
  return F * (1 - 0.5 * std::pow(chunks / m, 3));
}

inline double Meteor(const std::string& cand, const std::vector<std::string>& refs) {
  double best = 0.0;
  for (const auto& r : refs) best = std::max(best, MeteorPair(cand, r));
  return best;
}

}  // namespace oracle

#endif  // TRACKKIT_TESTS_ORACLES_TEXT_ORACLE_H_

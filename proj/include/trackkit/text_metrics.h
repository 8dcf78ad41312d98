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

// Caption metrics for referring expression generation: CIDEr-D and a
// lightweight METEOR (exact + suffix-stem matching, no synonym resources).

#ifndef TRACKKIT_TEXT_METRICS_H_
#define TRACKKIT_TEXT_METRICS_H_

#include <string>
#include <string_view>
#include <vector>

namespace trackkit::metrics {

// Lowercase, drop punctuation, split on whitespace.
std::vector<std::string> Tokenize(std::string_view text);

// Crude suffix stripper (plural -s/-es/-ies, -ing, -ed, -ly).
std::string Stem(std::string_view word);

struct CiderOptions {
  int max_n = 4;
  double sigma = 6.0;
};

// Per-candidate CIDEr-D scores. IDF comes from the reference sets of the
// whole corpus, so a single-item corpus always scores 0.
std::vector<double> CiderScores(const std::vector<std::string>& candidates,
                                const std::vector<std::vector<std::string>>& references,
                                const CiderOptions& options = {});

// Corpus mean of CiderScores.
double Cider(const std::vector<std::string>& candidates,
             const std::vector<std::vector<std::string>>& references,
             const CiderOptions& options = {});

struct MeteorStats {
  int matches = 0;
  int chunks = 0;
  double precision = 0.0;
  double recall = 0.0;
  double fmean = 0.0;
  double penalty = 0.0;
  double score = 0.0;
};

MeteorStats MeteorAgainst(std::string_view candidate, std::string_view reference);

// Best score over references. An empty candidate scores 0.
double MeteorLite(std::string_view candidate,
                  const std::vector<std::string>& references);

}  // namespace trackkit::metrics

#endif  // TRACKKIT_TEXT_METRICS_H_

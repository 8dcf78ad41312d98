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

#include "trackkit/text_metrics.h"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstring>
#include <map>
#include <numeric>
#include <set>

#include "trackkit/error.h"

namespace trackkit::metrics {
namespace {

using NGram = std::vector<std::string>;
using NGramCounts = std::map<NGram, double>;

bool EndsWith(std::string_view s, std::string_view suffix) {
  return s.size() >= suffix.size() &&
         s.compare(s.size() - suffix.size(), suffix.size(), suffix) == 0;
}

NGramCounts CountNGrams(const std::vector<std::string>& words, int max_n) {
  NGramCounts counts;
  for (int n = 1; n <= max_n; ++n) {
    for (std::size_t i = 0; i + n <= words.size(); ++i) {
      counts[NGram(words.begin() + i, words.begin() + i + n)] += 1.0;
    }
  }
  return counts;
}

struct TfIdf {
  std::vector<std::map<NGram, double>> vec;  // per n
  std::vector<double> norm;                  // per n
  double length = 0.0;                       // token count
};

TfIdf Weigh(const NGramCounts& counts, std::size_t length,
            const std::map<NGram, double>& doc_freq, double log_corpus,
            int max_n) {
  TfIdf out;
  out.vec.resize(max_n);
  out.norm.assign(max_n, 0.0);
  out.length = static_cast<double>(length);
  for (const auto& [gram, tf] : counts) {
    const auto it = doc_freq.find(gram);
    const double df = it == doc_freq.end() ? 0.0 : it->second;
    const double w = tf * (log_corpus - std::log(std::max(1.0, df)));
    const int n = static_cast<int>(gram.size()) - 1;
    out.vec[n][gram] = w;
    out.norm[n] += w * w;
  }
  for (double& v : out.norm) v = std::sqrt(v);
  return out;
}

double Similarity(const TfIdf& hyp, const TfIdf& ref, const CiderOptions& opt) {
  const double delta = hyp.length - ref.length;
  const double length_penalty =
      std::exp(-(delta * delta) / (2.0 * opt.sigma * opt.sigma));
  double total = 0.0;
  for (int n = 0; n < opt.max_n; ++n) {
    double val = 0.0;
    for (const auto& [gram, w] : hyp.vec[n]) {
      const auto it = ref.vec[n].find(gram);
      if (it == ref.vec[n].end()) continue;
      val += std::min(w, it->second) * it->second;
    }
    if (hyp.norm[n] != 0.0 && ref.norm[n] != 0.0) {
      val /= hyp.norm[n] * ref.norm[n];
    }
    total += val * length_penalty;
  }
  return total / opt.max_n;
}

}  // namespace

std::vector<std::string> Tokenize(std::string_view text) {
  std::vector<std::string> tokens;
  std::string current;
  for (char ch : text) {
    const auto u = static_cast<unsigned char>(ch);
    if (std::isspace(u)) {
      if (!current.empty()) tokens.push_back(std::move(current));
      current.clear();
    } else if (!std::ispunct(u)) {
      current += static_cast<char>(std::tolower(u));
    }
  }
  if (!current.empty()) tokens.push_back(std::move(current));
  return tokens;
}

namespace {

// "runn" -> "run", "stopp" -> "stop"; keeps ll/ss/zz ("fill", "pass").
std::string Undouble(std::string w) {
  const std::size_t n = w.size();
  if (n >= 3 && w[n - 1] == w[n - 2] && !std::strchr("aeiouylsz", w[n - 1])) {
    w.pop_back();
  }
  return w;
}

}  // namespace

std::string Stem(std::string_view word) {
  std::string w(word);
  if (w.size() <= 3) return w;
  if (EndsWith(w, "sses")) return w.substr(0, w.size() - 2);
  if (EndsWith(w, "ies")) return w.substr(0, w.size() - 3) + "y";
  if (EndsWith(w, "ing") && w.size() >= 6) return Undouble(w.substr(0, w.size() - 3));
  if (EndsWith(w, "ed") && w.size() >= 5) return Undouble(w.substr(0, w.size() - 2));
  if (EndsWith(w, "ly") && w.size() >= 5) return w.substr(0, w.size() - 2);
  if (EndsWith(w, "es") && w.size() >= 5 &&
      (EndsWith(w, "ches") || EndsWith(w, "shes") || EndsWith(w, "xes"))) {
    return w.substr(0, w.size() - 2);
  }
  if (EndsWith(w, "s") && !EndsWith(w, "ss") && !EndsWith(w, "us")) {
    return w.substr(0, w.size() - 1);
  }
  return w;
}

std::vector<double> CiderScores(const std::vector<std::string>& candidates,
                                const std::vector<std::vector<std::string>>& references,
                                const CiderOptions& options) {
  if (candidates.empty()) throw Error(ErrorCode::kEmptyCorpus, "no candidates");
  if (candidates.size() != references.size()) {
    throw Error(ErrorCode::kShapeError, "candidate/reference count mismatch");
  }
  const int max_n = options.max_n;

  struct Counted {
    NGramCounts counts;
    std::size_t length = 0;
  };
  std::vector<Counted> hyps;
  std::vector<std::vector<Counted>> refs;
  std::map<NGram, double> doc_freq;
  for (std::size_t i = 0; i < candidates.size(); ++i) {
    if (references[i].empty()) {
      throw Error(ErrorCode::kEmptyCorpus,
                  "candidate " + std::to_string(i) + " has no references");
    }
    const auto words = Tokenize(candidates[i]);
    hyps.push_back({CountNGrams(words, max_n), words.size()});
    std::set<NGram> seen;
    refs.emplace_back();
    for (const auto& r : references[i]) {
      const auto rw = Tokenize(r);
      refs.back().push_back({CountNGrams(rw, max_n), rw.size()});
      for (const auto& [gram, _] : refs.back().back().counts) seen.insert(gram);
    }
    for (const auto& gram : seen) doc_freq[gram] += 1.0;
  }

  const double log_corpus = std::log(static_cast<double>(candidates.size()));
  std::vector<double> scores;
  for (std::size_t i = 0; i < hyps.size(); ++i) {
    const TfIdf h = Weigh(hyps[i].counts, hyps[i].length, doc_freq, log_corpus, max_n);
    double sum = 0.0;
    for (const auto& r : refs[i]) {
      sum += Similarity(h, Weigh(r.counts, r.length, doc_freq, log_corpus, max_n),
                        options);
    }
    scores.push_back(10.0 * sum / static_cast<double>(refs[i].size()));
  }
  return scores;
}

double Cider(const std::vector<std::string>& candidates,
             const std::vector<std::vector<std::string>>& references,
             const CiderOptions& options) {
  const auto scores = CiderScores(candidates, references, options);
  return std::accumulate(scores.begin(), scores.end(), 0.0) /
         static_cast<double>(scores.size());
}

MeteorStats MeteorAgainst(std::string_view candidate, std::string_view reference) {
  const auto hyp = Tokenize(candidate);
  const auto ref = Tokenize(reference);
  MeteorStats s;
  if (hyp.empty() || ref.empty()) return s;

  // align[i] = reference position matched by candidate word i, or -1.
  std::vector<int> align(hyp.size(), -1);
  std::vector<bool> used(ref.size(), false);
  auto match_stage = [&](auto&& same) {
    for (std::size_t i = 0; i < hyp.size(); ++i) {
      if (align[i] >= 0) continue;
      for (std::size_t j = 0; j < ref.size(); ++j) {
        if (!used[j] && same(hyp[i], ref[j])) {
          align[i] = static_cast<int>(j);
          used[j] = true;
          break;
        }
      }
    }
  };
  match_stage([](const std::string& a, const std::string& b) { return a == b; });
  match_stage([](const std::string& a, const std::string& b) {
    return Stem(a) == Stem(b);
  });

  int prev = -2;
  bool prev_matched = false;
  for (int a : align) {
    if (a >= 0) {
      ++s.matches;
      if (!prev_matched || a != prev + 1) ++s.chunks;
      prev = a;
      prev_matched = true;
    } else {
      prev_matched = false;
    }
  }
  if (s.matches == 0) return s;

  const double m = s.matches;
  s.precision = m / static_cast<double>(hyp.size());
  s.recall = m / static_cast<double>(ref.size());
  s.fmean = s.precision * s.recall / (0.9 * s.precision + 0.1 * s.recall);
  s.penalty = 0.5 * std::pow(static_cast<double>(s.chunks) / m, 3.0);
  s.score = s.fmean * (1.0 - s.penalty);
  return s;
}

double MeteorLite(std::string_view candidate,
                  const std::vector<std::string>& references) {
  if (references.empty()) {
    throw Error(ErrorCode::kEmptyCorpus, "METEOR needs at least one reference");
  }
  double best = 0.0;
  for (const auto& r : references) {
    best = std::max(best, MeteorAgainst(candidate, r).score);
  }
  return best;
}

}  // namespace trackkit::metrics

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

// Reference implementation of the token selector: a gate MLP scores every
// visual token, a softmax normalizes the scores over the frame, the top-k
// tokens are kept in their original order, and a projection MLP maps them to
// the language model width.
//
//   scores = softmax(gate(F))           F: N x C
//   G      = rows of F at top-k scores  (optionally scaled by their score)
//   T      = proj(G)                    T: k x D
//
// Backward treats the selected index set as fixed, which is exact everywhere
// except on the measure-zero set where two scores tie at the k-th position.

#ifndef TRACKKIT_TSELECTOR_H_
#define TRACKKIT_TSELECTOR_H_

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "trackkit/error.h"

namespace trackkit::tselector {

template <typename Scalar>
using Matrix = Eigen::Matrix<Scalar, Eigen::Dynamic, Eigen::Dynamic>;
template <typename Scalar>
using Vector = Eigen::Matrix<Scalar, Eigen::Dynamic, 1>;
template <typename Scalar>
using RowVector = Eigen::Matrix<Scalar, 1, Eigen::Dynamic>;

enum class Activation { kGelu, kIdentity };

template <typename Scalar>
Scalar Activate(Activation act, Scalar x) {
  if (act == Activation::kIdentity) return x;
  return Scalar(0.5) * x * (Scalar(1) + std::erf(x / std::sqrt(Scalar(2))));
}

template <typename Scalar>
Scalar ActivateDerivative(Activation act, Scalar x) {
  if (act == Activation::kIdentity) return Scalar(1);
  const Scalar cdf = Scalar(0.5) * (Scalar(1) + std::erf(x / std::sqrt(Scalar(2))));
  const Scalar pdf = std::exp(Scalar(-0.5) * x * x) /
                     std::sqrt(Scalar(2) * Scalar(M_PI));
  return cdf + x * pdf;
}

template <typename Derived>
auto ActivateAll(Activation act, const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([act](Scalar v) { return Activate(act, v); }).eval();
}

template <typename Derived>
auto ActivateDerivativeAll(Activation act, const Eigen::MatrixBase<Derived>& x) {
  using Scalar = typename Derived::Scalar;
  return x.unaryExpr([act](Scalar v) { return ActivateDerivative(act, v); })
      .eval();
}

// Gate: C -> hidden -> 1 per token. Projection: C -> D -> D.
template <typename Scalar>
struct SelectorParams {
  Matrix<Scalar> gate_w1;  // C x hidden
  Vector<Scalar> gate_b1;  // hidden
  Vector<Scalar> gate_w2;  // hidden
  Scalar gate_b2 = Scalar(0);
  Matrix<Scalar> proj_w1;  // C x D
  Vector<Scalar> proj_b1;  // D
  Matrix<Scalar> proj_w2;  // D x D
  Vector<Scalar> proj_b2;  // D
  int k = 1;
  // Scale each kept token by its softmax score so the gate receives
  // gradient. Off means pure selection.
  bool weight_by_score = true;
  Activation gate_activation = Activation::kGelu;
  Activation proj_activation = Activation::kGelu;
  std::uint64_t seed = 0;

  Eigen::Index channels() const { return gate_w1.rows(); }
  Eigen::Index hidden() const { return gate_w1.cols(); }
  Eigen::Index out_dim() const { return proj_w2.cols(); }

  // Weights ~ N(0, 1/fan_in), biases ~ N(0, 0.01).
  static SelectorParams Random(Eigen::Index channels, Eigen::Index hidden,
                               Eigen::Index out_dim, int k, std::uint64_t seed) {
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal(0.0, 1.0);
    auto fill = [&](Eigen::Index rows, Eigen::Index cols, double scale) {
      Matrix<Scalar> m(rows, cols);
      for (Eigen::Index j = 0; j < cols; ++j)
        for (Eigen::Index i = 0; i < rows; ++i)
          m(i, j) = Scalar(scale * normal(rng));
      return m;
    };
    SelectorParams p;
    p.gate_w1 = fill(channels, hidden, 1.0 / std::sqrt(double(channels)));
    p.gate_b1 = fill(hidden, 1, 0.1);
    p.gate_w2 = fill(hidden, 1, 1.0 / std::sqrt(double(hidden)));
    p.gate_b2 = Scalar(0.1 * normal(rng));
    p.proj_w1 = fill(channels, out_dim, 1.0 / std::sqrt(double(channels)));
    p.proj_b1 = fill(out_dim, 1, 0.1);
    p.proj_w2 = fill(out_dim, out_dim, 1.0 / std::sqrt(double(out_dim)));
    p.proj_b2 = fill(out_dim, 1, 0.1);
    p.k = k;
    p.seed = seed;
    return p;
  }

  // Zero gate, identity-like projection (C x D and D x D with ones on the
  // diagonal), linear activations, pure selection.
  static SelectorParams IdentityProjection(Eigen::Index channels,
                                           Eigen::Index out_dim, int k) {
    SelectorParams p;
    const Eigen::Index hidden = std::max<Eigen::Index>(1, channels / 4);
    p.gate_w1 = Matrix<Scalar>::Zero(channels, hidden);
    p.gate_b1 = Vector<Scalar>::Zero(hidden);
    p.gate_w2 = Vector<Scalar>::Zero(hidden);
    p.proj_w1 = Matrix<Scalar>::Identity(channels, out_dim);
    p.proj_b1 = Vector<Scalar>::Zero(out_dim);
    p.proj_w2 = Matrix<Scalar>::Identity(out_dim, out_dim);
    p.proj_b2 = Vector<Scalar>::Zero(out_dim);
    p.k = k;
    p.weight_by_score = false;
    p.gate_activation = Activation::kIdentity;
    p.proj_activation = Activation::kIdentity;
    return p;
  }
};

template <typename Scalar>
void ValidateParams(const SelectorParams<Scalar>& p) {
  const bool ok = p.gate_b1.size() == p.hidden() &&
                  p.gate_w2.size() == p.hidden() &&
                  p.proj_w1.rows() == p.channels() &&
                  p.proj_b1.size() == p.proj_w1.cols() &&
                  p.proj_w2.rows() == p.proj_w1.cols() &&
                  p.proj_b2.size() == p.proj_w2.cols();
  if (!ok) throw Error(ErrorCode::kShapeError, "inconsistent selector params");
}

template <typename Scalar>
void ValidateTokens(const Matrix<Scalar>& tokens, Eigen::Index channels) {
  if (tokens.rows() < 1 || tokens.cols() < 1) {
    throw Error(ErrorCode::kShapeError, "token matrix must be at least 1x1");
  }
  if (tokens.cols() != channels) {
    throw Error(ErrorCode::kShapeError,
                "token channels " + std::to_string(tokens.cols()) +
                    " != gate input " + std::to_string(channels));
  }
  if (!tokens.allFinite()) {
    throw Error(ErrorCode::kNonFiniteInput, "token matrix");
  }
}

template <typename Scalar>
Vector<Scalar> Softmax(const Vector<Scalar>& logits) {
  const Vector<Scalar> e = (logits.array() - logits.maxCoeff()).exp().matrix();
  return e / e.sum();
}

template <typename Scalar>
Vector<Scalar> GateLogits(const Matrix<Scalar>& tokens,
                          const SelectorParams<Scalar>& p) {
  const Matrix<Scalar> pre =
      (tokens * p.gate_w1).rowwise() + p.gate_b1.transpose();
  return (ActivateAll(p.gate_activation, pre) * p.gate_w2).array() + p.gate_b2;
}

template <typename Scalar>
Vector<Scalar> GateScores(const Matrix<Scalar>& tokens,
                          const SelectorParams<Scalar>& p) {
  ValidateParams(p);
  ValidateTokens(tokens, p.channels());
  return Softmax(GateLogits(tokens, p));
}

template <typename Scalar>
struct TopK {
  std::vector<Eigen::Index> indices;  // ascending
  Matrix<Scalar> selected;            // k x C, rows in index order
};

// Indices of the k largest scores, ties toward the lower index, returned in
// original token order.
template <typename Scalar>
std::vector<Eigen::Index> TopKIndices(const Vector<Scalar>& scores, int k) {
  const Eigen::Index n = scores.size();
  if (k < 1 || k > n) {
    throw Error(ErrorCode::kInvalidK, "k=" + std::to_string(k) +
                                          " with N=" + std::to_string(n));
  }
  std::vector<Eigen::Index> order(n);
  std::iota(order.begin(), order.end(), Eigen::Index{0});
  std::nth_element(order.begin(), order.begin() + (k - 1), order.end(),
                   [&](Eigen::Index a, Eigen::Index b) {
                     if (scores(a) != scores(b)) return scores(a) > scores(b);
                     return a < b;
                   });
  order.resize(k);
  std::sort(order.begin(), order.end());
  return order;
}

template <typename Scalar>
TopK<Scalar> KeepTopK(const Vector<Scalar>& scores, int k,
                      const Matrix<Scalar>& tokens) {
  if (scores.size() != tokens.rows()) {
    throw Error(ErrorCode::kShapeError, "scores/tokens length mismatch");
  }
  TopK<Scalar> out;
  out.indices = TopKIndices(scores, k);
  out.selected = tokens(out.indices, Eigen::all);
  return out;
}

template <typename Scalar>
struct SelectionResult {
  std::vector<Eigen::Index> indices;
  Vector<Scalar> scores;  // N
  Matrix<Scalar> output;  // k x D
};

template <typename Scalar>
SelectionResult<Scalar> Forward(const Matrix<Scalar>& tokens,
                                const SelectorParams<Scalar>& p) {
  SelectionResult<Scalar> r;
  r.scores = GateScores(tokens, p);
  TopK<Scalar> top = KeepTopK(r.scores, p.k, tokens);
  if (p.weight_by_score) {
    top.selected = r.scores(top.indices).asDiagonal() * top.selected;
  }
  const Matrix<Scalar> hidden = ActivateAll(
      p.proj_activation,
      ((top.selected * p.proj_w1).rowwise() + p.proj_b1.transpose()).eval());
  r.output = (hidden * p.proj_w2).rowwise() + p.proj_b2.transpose();
  r.indices = std::move(top.indices);
  return r;
}

template <typename Scalar>
struct Gradients {
  Matrix<Scalar> tokens;
  Matrix<Scalar> gate_w1;
  Vector<Scalar> gate_b1;
  Vector<Scalar> gate_w2;
  Scalar gate_b2 = Scalar(0);
  Matrix<Scalar> proj_w1;
  Vector<Scalar> proj_b1;
  Matrix<Scalar> proj_w2;
  Vector<Scalar> proj_b2;
};

template <typename Scalar>
Gradients<Scalar> Backward(const Matrix<Scalar>& tokens,
                           const SelectorParams<Scalar>& p,
                           const Matrix<Scalar>& upstream) {
  ValidateParams(p);
  ValidateTokens(tokens, p.channels());
  if (upstream.rows() != p.k || upstream.cols() != p.out_dim()) {
    throw Error(ErrorCode::kShapeError, "upstream gradient must be k x D");
  }
  if (!upstream.allFinite()) {
    throw Error(ErrorCode::kNonFiniteInput, "upstream gradient");
  }

  // Forward, keeping intermediates.
  const Matrix<Scalar> gate_pre =
      (tokens * p.gate_w1).rowwise() + p.gate_b1.transpose();
  const Matrix<Scalar> gate_hidden = ActivateAll(p.gate_activation, gate_pre);
  const Vector<Scalar> logits = (gate_hidden * p.gate_w2).array() + p.gate_b2;
  const Vector<Scalar> scores = Softmax(logits);
  const std::vector<Eigen::Index> idx = TopKIndices(scores, p.k);
  const Matrix<Scalar> raw = tokens(idx, Eigen::all);
  const Vector<Scalar> kept_scores = scores(idx);
  const Matrix<Scalar> selected =
      p.weight_by_score ? Matrix<Scalar>(kept_scores.asDiagonal() * raw) : raw;
  const Matrix<Scalar> proj_pre =
      (selected * p.proj_w1).rowwise() + p.proj_b1.transpose();
  const Matrix<Scalar> proj_hidden = ActivateAll(p.proj_activation, proj_pre);

  Gradients<Scalar> g;
  // Projection MLP.
  g.proj_w2 = proj_hidden.transpose() * upstream;
  g.proj_b2 = upstream.colwise().sum().transpose();
  const Matrix<Scalar> d_proj_pre =
      ((upstream * p.proj_w2.transpose()).array() *
       ActivateDerivativeAll(p.proj_activation, proj_pre).array())
          .matrix();
  g.proj_w1 = selected.transpose() * d_proj_pre;
  g.proj_b1 = d_proj_pre.colwise().sum().transpose();
  const Matrix<Scalar> d_selected = d_proj_pre * p.proj_w1.transpose();

  // Selection and optional score weighting.
  g.tokens = Matrix<Scalar>::Zero(tokens.rows(), tokens.cols());
  Vector<Scalar> d_scores = Vector<Scalar>::Zero(scores.size());
  for (std::size_t j = 0; j < idx.size(); ++j) {
    const Eigen::Index row = idx[j];
    const Eigen::Index jj = static_cast<Eigen::Index>(j);
    if (p.weight_by_score) {
      g.tokens.row(row) += kept_scores(jj) * d_selected.row(jj);
      d_scores(row) = d_selected.row(jj).dot(raw.row(jj));
    } else {
      g.tokens.row(row) += d_selected.row(jj);
    }
  }

  // Softmax and gate MLP.
  const Vector<Scalar> d_logits =
      (scores.array() * (d_scores.array() - scores.dot(d_scores))).matrix();
  g.gate_w2 = gate_hidden.transpose() * d_logits;
  g.gate_b2 = d_logits.sum();
  const Matrix<Scalar> d_gate_pre =
      ((d_logits * p.gate_w2.transpose()).array() *
       ActivateDerivativeAll(p.gate_activation, gate_pre).array())
          .matrix();
  g.gate_w1 = tokens.transpose() * d_gate_pre;
  g.gate_b1 = d_gate_pre.colwise().sum().transpose();
  g.tokens += d_gate_pre * p.gate_w1.transpose();
  return g;
}

// Position of each frame's timestamp slot and token block in the flattened
// visual sequence [ts_0, tokens_0, ts_1, tokens_1, ...].
struct FrameBlock {
  int frame_index = 0;
  std::size_t timestamp_position = 0;
  std::size_t token_begin = 0;
  std::size_t token_count = 0;
};

struct TokenLayout {
  std::vector<FrameBlock> blocks;
  std::size_t total_positions = 0;
};

template <typename Scalar>
TokenLayout TimestampLayout(const std::vector<SelectionResult<Scalar>>& results,
                            const std::vector<int>& frame_indices) {
  if (results.empty() || results.size() != frame_indices.size()) {
    throw Error(ErrorCode::kShapeError,
                "need one frame index per selection result");
  }
  TokenLayout layout;
  std::size_t pos = 0;
  for (std::size_t i = 0; i < results.size(); ++i) {
    FrameBlock b;
    b.frame_index = frame_indices[i];
    b.timestamp_position = pos++;
    b.token_begin = pos;
    b.token_count = static_cast<std::size_t>(results[i].output.rows());
    pos += b.token_count;
    layout.blocks.push_back(b);
  }
  layout.total_positions = pos;
  return layout;
}

// Flat binary container: "TKSP", uint32 little-endian header length, JSON
// header, then float64 little-endian payload in header "order".
void SaveParams(const SelectorParams<double>& p, const std::string& path);
SelectorParams<double> LoadParams(const std::string& path);

}  // namespace trackkit::tselector

#endif  // TRACKKIT_TSELECTOR_H_

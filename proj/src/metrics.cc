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

#include "trackkit/metrics.h"

#include <cmath>
#include <numeric>

#include "trackkit/error.h"

namespace trackkit::metrics {
namespace {

double Mean(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

void CheckGrid(const std::vector<double>& thresholds) {
  if (thresholds.empty()) throw Error(ErrorCode::kShapeError, "empty threshold grid");
  for (std::size_t i = 1; i < thresholds.size(); ++i) {
    if (!(thresholds[i] > thresholds[i - 1])) {
      throw Error(ErrorCode::kShapeError, "thresholds must be strictly increasing");
    }
  }
}

}  // namespace

double EvalCurve::At(double threshold) const {
  for (std::size_t i = 0; i < thresholds.size(); ++i) {
    if (std::abs(thresholds[i] - threshold) < 1e-12) return values[i];
  }
  throw Error(ErrorCode::kShapeError, "threshold not on curve grid");
}

std::vector<double> SuccessThresholds() {
  std::vector<double> t;
  for (int i = 0; i <= 20; ++i) t.push_back(i / 20.0);
  return t;
}

std::vector<double> PrecisionThresholds() {
  std::vector<double> t;
  for (int i = 0; i <= 50; ++i) t.push_back(i);
  return t;
}

EvalCurve SuccessCurveFromOverlaps(std::span<const double> overlaps,
                                   const std::vector<double>& thresholds) {
  if (overlaps.empty()) throw Error(ErrorCode::kEmptyTrajectory, "no frames");
  CheckGrid(thresholds);
  EvalCurve c;
  c.thresholds = thresholds;
  const double n = static_cast<double>(overlaps.size());
  for (double t : thresholds) {
    std::size_t hits = 0;
    for (double o : overlaps) hits += o > t;
    c.values.push_back(hits / n);
  }
  c.auc = Mean(c.values);
  return c;
}

EvalCurve PrecisionCurveFromErrors(std::span<const double> errors,
                                   const std::vector<double>& thresholds) {
  if (errors.empty()) throw Error(ErrorCode::kEmptyTrajectory, "no frames");
  CheckGrid(thresholds);
  EvalCurve c;
  c.thresholds = thresholds;
  const double n = static_cast<double>(errors.size());
  for (double t : thresholds) {
    std::size_t hits = 0;
    for (double e : errors) hits += e <= t;
    c.values.push_back(hits / n);
  }
  c.auc = Mean(c.values);
  return c;
}

void CheckAligned(const Trajectory& gt, const Trajectory& pred) {
  if (gt.empty() || pred.empty()) {
    throw Error(ErrorCode::kEmptyTrajectory, gt.video_id);
  }
  if (gt.size() != pred.size()) {
    throw Error(ErrorCode::kFrameMismatch, gt.video_id + ": frame counts differ");
  }
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (gt.frames[i].frame != pred.frames[i].frame) {
      throw Error(ErrorCode::kFrameMismatch,
                  gt.video_id + ": frame " + std::to_string(gt.frames[i].frame));
    }
  }
}

EvalCurve SuccessCurve(const Trajectory& gt, const Trajectory& pred) {
  CheckAligned(gt, pred);
  std::vector<double> overlaps;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    overlaps.push_back(Iou(gt.frames[i].box, pred.frames[i].box));
  }
  return SuccessCurveFromOverlaps(overlaps);
}

EvalCurve PrecisionCurve(const Trajectory& gt, const Trajectory& pred,
                         double frame_w, double frame_h) {
  CheckAligned(gt, pred);
  std::vector<double> errors;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    errors.push_back(
        CenterError(gt.frames[i].box, pred.frames[i].box, frame_w, frame_h));
  }
  return PrecisionCurveFromErrors(errors);
}

double NormPrecision(const Trajectory& gt, const Trajectory& pred,
                     double threshold) {
  CheckAligned(gt, pred);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    hits += NormCenterError(gt.frames[i].box, pred.frames[i].box) <= threshold;
  }
  return static_cast<double>(hits) / static_cast<double>(gt.size());
}

}  // namespace trackkit::metrics

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

// One-pass evaluation curves for single object tracking.

#ifndef TRACKKIT_METRICS_H_
#define TRACKKIT_METRICS_H_

#include <span>
#include <vector>

#include "trackkit/trajectory.h"

namespace trackkit::metrics {

struct EvalCurve {
  std::vector<double> thresholds;  // strictly increasing
  std::vector<double> values;      // in [0, 1]
  double auc = 0.0;                // mean of values

  // Value at the given threshold; throws if it is not on the grid.
  double At(double threshold) const;
};

inline constexpr double kPrecisionThresholdPx = 20.0;
inline constexpr double kNormPrecisionThreshold = 0.2;

// 0.00, 0.05, ..., 1.00
std::vector<double> SuccessThresholds();
// 0, 1, ..., 50 pixels
std::vector<double> PrecisionThresholds();

// value(t) = fraction of overlaps strictly greater than t.
EvalCurve SuccessCurveFromOverlaps(std::span<const double> overlaps,
                                   const std::vector<double>& thresholds = SuccessThresholds());

// value(t) = fraction of errors <= t.
EvalCurve PrecisionCurveFromErrors(std::span<const double> errors,
                                   const std::vector<double>& thresholds = PrecisionThresholds());

// Throws EmptyTrajectory, or FrameMismatch when frame index sets differ.
void CheckAligned(const Trajectory& gt, const Trajectory& pred);

EvalCurve SuccessCurve(const Trajectory& gt, const Trajectory& pred);
EvalCurve PrecisionCurve(const Trajectory& gt, const Trajectory& pred,
                         double frame_w, double frame_h);
double NormPrecision(const Trajectory& gt, const Trajectory& pred,
                     double threshold = kNormPrecisionThreshold);

}  // namespace trackkit::metrics

#endif  // TRACKKIT_METRICS_H_

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

#include "trackkit/kalman.h"

#include <algorithm>

namespace trackkit {

DriftReport DriftCheck(const Trajectory& t, double gate_threshold,
                       const KalmanNoise<double>& noise) {
  if (t.frames.size() < 2) {
    throw Error(ErrorCode::kTooShort,
                "drift check needs at least 2 frames: " + t.video_id);
  }
  DriftReport report;
  KalmanState<double> state = KalmanInit(t.frames.front().box, noise);
  for (std::size_t i = 1; i < t.frames.size(); ++i) {
    const TrackedFrame& f = t.frames[i];
    state = KalmanPredict(state, noise);
    const double d = GateDistance(state, f.box, noise);
    report.gate_distances.push_back(d);
    report.max_gate_distance = std::max(report.max_gate_distance, d);
    if (d > gate_threshold) {
      report.flagged_frames.push_back(f.frame);
    } else {
      state = KalmanUpdate(state, f.box, noise);
    }
  }
  report.drifted = !report.flagged_frames.empty();
  return report;
}

}  // namespace trackkit

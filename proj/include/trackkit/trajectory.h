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

#ifndef TRACKKIT_TRAJECTORY_H_
#define TRACKKIT_TRAJECTORY_H_

#include <string>
#include <vector>

#include "trackkit/geometry.h"

namespace trackkit {

struct TrackedFrame {
  int frame = 0;
  Box box;
  double score = 1.0;

  friend bool operator==(const TrackedFrame&, const TrackedFrame&) = default;
};

// Per-frame boxes for one object in one video, frame indices strictly
// increasing.
struct Trajectory {
  std::string video_id;
  std::string chunk_text;
  std::vector<TrackedFrame> frames;

  bool empty() const { return frames.empty(); }
  std::size_t size() const { return frames.size(); }
};

// Throws EmptyTrajectory, ParseError (non-increasing frames) or InvalidBox.
void ValidateTrajectory(const Trajectory& t);

}  // namespace trackkit

#endif  // TRACKKIT_TRAJECTORY_H_

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

#include "trackkit/trajectory.h"

#include "trackkit/error.h"

namespace trackkit {

void ValidateTrajectory(const Trajectory& t) {
  if (t.empty()) {
    throw Error(ErrorCode::kEmptyTrajectory, t.video_id + "/" + t.chunk_text);
  }
  for (std::size_t i = 0; i < t.frames.size(); ++i) {
    ValidateBox(t.frames[i].box);
    if (i > 0 && t.frames[i].frame <= t.frames[i - 1].frame) {
      throw Error(ErrorCode::kParseError,
                  "frame indices not strictly increasing in " + t.video_id);
    }
  }
}

}  // namespace trackkit

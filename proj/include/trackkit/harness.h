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

// Inference orchestration: clip scheduling with a one-frame overlap and box
// handoff between clips, frame sampling policies, and the request/response
// contract for an external tracking model.

#ifndef TRACKKIT_HARNESS_H_
#define TRACKKIT_HARNESS_H_

#include <functional>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "trackkit/geometry.h"
#include "trackkit/jsonl.h"

namespace trackkit::harness {

// Half-open frame range [start, end).
struct Clip {
  int start = 0;
  int end = 0;

  int size() const { return end - start; }
  friend bool operator==(const Clip&, const Clip&) = default;
};

struct ClipSchedule {
  std::vector<Clip> clips;
};

inline constexpr int kClipLength = 8;
inline constexpr int kMaxUnsplitFrames = 32;

// Videos of at most `max_unsplit` frames run as one clip. Longer videos are
// cut into `clip_len`-frame clips with stride clip_len - 1, so consecutive
// clips share one frame; the tail clip may be shorter but has >= 2 frames.
ClipSchedule ScheduleClips(int frame_count, int clip_len = kClipLength,
                           int max_unsplit = kMaxUnsplitFrames);

// n evenly spaced indices floor((i + 0.5) * frame_count / n), duplicates
// removed when frame_count < n.
std::vector<int> UniformSample(int frame_count, int n = 16);

struct TrainingSampleConfig {
  int min_count = 2;
  int max_count = 8;
  int max_interval = 60;
};

// Random count c and interval v; v shrinks to the largest feasible value
// when (c - 1) * v does not fit the video.
std::vector<int> TrainingSample(int frame_count, std::mt19937_64& rng,
                                const TrainingSampleConfig& config = {});

enum class PromptMode { kBox, kExpression };

struct TrackRequest {
  std::string id;
  std::string video_id;
  std::vector<std::string> frames;
  PromptMode mode = PromptMode::kBox;
  // "[a,b,c,d]" in box mode, the expression text in expression mode.
  std::string init;
  std::string prompt_template;
  // RSOT clips after the first carry the expression alongside the handoff box.
  std::optional<std::string> expression;
};

struct TrackResponse {
  std::string id;
  std::vector<std::string> per_frame;
};

Json RequestToJson(const TrackRequest& r);
TrackRequest RequestFromJson(const Json& j);
Json ResponseToJson(const TrackResponse& r);
TrackResponse ResponseFromJson(const Json& j);

// One model call per clip. Implementations need not be thread-safe; the
// harness gives each worker its own client.
class TrackingClient {
 public:
  virtual ~TrackingClient() = default;
  virtual TrackResponse Track(const TrackRequest& request) = 0;
};

using ClientFactory = std::function<std::unique_ptr<TrackingClient>()>;

struct VideoMeta {
  std::string video_id;
  std::vector<std::string> frames;
  std::optional<QuantBox> init_box;
  std::optional<std::string> expression;
};

VideoMeta VideoMetaFromJson(const Json& j);

struct TrackingOptions {
  int clip_len = kClipLength;
  int max_unsplit = kMaxUnsplitFrames;
  bool strict = false;
  int retries = 2;
  std::string box_prompt = "Track the object at {init} through these frames.";
  std::string expression_prompt = "Find {init} and track it through these frames.";
};

struct TrackingOutcome {
  std::string video_id;
  std::optional<std::string> expression;
  std::vector<QuantBox> boxes;  // one per frame, index = frame number
  std::vector<std::string> warnings;
};

// Runs every clip in order. Clip 0 starts from the given box (box mode) or
// expression only (expression mode); later clips start from the box predicted
// for the previous clip's last frame. The later clip's prediction wins on
// overlap frames. An unparseable frame repeats the previous box (or aborts
// when strict).
TrackingOutcome RunTracking(const VideoMeta& video, PromptMode mode,
                            TrackingClient& client, const ClipSchedule& schedule,
                            const TrackingOptions& options = {});

// Tracks every video on up to `parallel` workers, each with its own client.
// Results are returned in input order.
std::vector<TrackingOutcome> TrackAll(const std::vector<VideoMeta>& videos,
                                      PromptMode mode, const ClientFactory& factory,
                                      const TrackingOptions& options, int parallel);

Json OutcomeToJson(const TrackingOutcome& outcome);

}  // namespace trackkit::harness

#endif  // TRACKKIT_HARNESS_H_

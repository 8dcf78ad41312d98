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

#include "trackkit/harness.h"

#include <algorithm>
#include <atomic>
#include <exception>
#include <mutex>
#include <thread>

#include "trackkit/error.h"
#include "trackkit/log.h"

namespace trackkit::harness {
namespace {

const char* ModeName(PromptMode m) {
  return m == PromptMode::kBox ? "box" : "expr";
}

PromptMode ModeFromName(const std::string& s) {
  if (s == "box") return PromptMode::kBox;
  if (s == "expr") return PromptMode::kExpression;
  throw Error(ErrorCode::kParseError, "unknown mode " + s);
}

TrackResponse CallWithRetry(TrackingClient& client, const TrackRequest& request,
                            int retries) {
  std::string last_error;
  for (int attempt = 0; attempt <= retries; ++attempt) {
    try {
      TrackResponse response = client.Track(request);
      if (response.per_frame.size() != request.frames.size()) {
        throw Error(ErrorCode::kClientError,
                    "response has " + std::to_string(response.per_frame.size()) +
                        " frames, expected " + std::to_string(request.frames.size()));
      }
      return response;
    } catch (const std::exception& e) {
      last_error = e.what();
      LogWarn(request.id + ": attempt " + std::to_string(attempt + 1) +
              " failed: " + last_error);
    }
  }
  throw Error(ErrorCode::kClientError, request.id + ": " + last_error);
}

}  // namespace

ClipSchedule ScheduleClips(int frame_count, int clip_len, int max_unsplit) {
  if (frame_count < 2) {
    throw Error(ErrorCode::kTooShort,
                "need at least 2 frames, got " + std::to_string(frame_count));
  }
  if (clip_len < 2) {
    throw Error(ErrorCode::kShapeError, "clip length must be at least 2");
  }
  ClipSchedule s;
  if (frame_count <= max_unsplit) {
    s.clips.push_back({0, frame_count});
    return s;
  }
  const int stride = clip_len - 1;
  for (int start = 0;; start += stride) {
    const int end = std::min(start + clip_len, frame_count);
    s.clips.push_back({start, end});
    if (end == frame_count) break;
  }
  // Stopping at the first clip that reaches the end means the tail always
  // has at least two frames; this guards a one-frame tail regardless.
  if (s.clips.size() > 1 && s.clips.back().size() < 2) {
    s.clips.pop_back();
    s.clips.back().end = frame_count;
  }
  return s;
}

std::vector<int> UniformSample(int frame_count, int n) {
  if (frame_count < 1 || n < 1) {
    throw Error(ErrorCode::kTooShort, "uniform sampling needs frames and n >= 1");
  }
  std::vector<int> out;
  for (int i = 0; i < n; ++i) {
    const long long idx =
        (static_cast<long long>(2 * i + 1) * frame_count) / (2LL * n);
    if (out.empty() || out.back() != idx) out.push_back(static_cast<int>(idx));
  }
  return out;
}

std::vector<int> TrainingSample(int frame_count, std::mt19937_64& rng,
                                const TrainingSampleConfig& config) {
  if (frame_count < 2) {
    throw Error(ErrorCode::kTooShort, "training sample needs at least 2 frames");
  }
  std::uniform_int_distribution<int> count_dist(config.min_count, config.max_count);
  std::uniform_int_distribution<int> interval_dist(1, config.max_interval);
  int count = std::min(count_dist(rng), frame_count);
  int interval = interval_dist(rng);
  interval = std::min(interval, (frame_count - 1) / (count - 1));
  std::uniform_int_distribution<int> start_dist(
      0, frame_count - 1 - (count - 1) * interval);
  const int start = start_dist(rng);
  std::vector<int> out;
  for (int i = 0; i < count; ++i) out.push_back(start + i * interval);
  return out;
}

Json RequestToJson(const TrackRequest& r) {
  Json j;
  j["id"] = r.id;
  j["video_id"] = r.video_id;
  j["frames"] = r.frames;
  j["mode"] = ModeName(r.mode);
  j["init"] = r.init;
  j["prompt_template"] = r.prompt_template;
  if (r.expression) j["expression"] = *r.expression;
  return j;
}

TrackRequest RequestFromJson(const Json& j) {
  TrackRequest r;
  r.id = RequireString(j, "id");
  r.video_id = RequireString(j, "video_id");
  for (const auto& f : RequireField(j, "frames")) r.frames.push_back(f.get<std::string>());
  r.mode = ModeFromName(RequireString(j, "mode"));
  r.init = RequireString(j, "init");
  r.prompt_template = j.value("prompt_template", "");
  if (j.contains("expression")) r.expression = RequireString(j, "expression");
  return r;
}

Json ResponseToJson(const TrackResponse& r) {
  Json j;
  j["id"] = r.id;
  j["per_frame"] = r.per_frame;
  return j;
}

TrackResponse ResponseFromJson(const Json& j) {
  TrackResponse r;
  r.id = RequireString(j, "id");
  for (const auto& f : RequireField(j, "per_frame")) {
    if (!f.is_string()) throw Error(ErrorCode::kParseError, "per_frame entries must be strings");
    r.per_frame.push_back(f.get<std::string>());
  }
  return r;
}

VideoMeta VideoMetaFromJson(const Json& j) {
  VideoMeta v;
  v.video_id = RequireString(j, "video_id");
  if (j.contains("frames")) {
    for (const auto& f : j.at("frames")) {
      if (!f.is_string()) throw Error(ErrorCode::kParseError, "frame refs must be strings");
      v.frames.push_back(f.get<std::string>());
    }
  } else {
    const int n = RequireInt(j, "frame_count");
    for (int i = 0; i < n; ++i) v.frames.push_back(std::to_string(i));
  }
  if (j.contains("init")) v.init_box = ParseQuantBox(RequireString(j, "init"));
  if (j.contains("expression")) v.expression = RequireString(j, "expression");
  return v;
}

TrackingOutcome RunTracking(const VideoMeta& video, PromptMode mode,
                            TrackingClient& client, const ClipSchedule& schedule,
                            const TrackingOptions& options) {
  const int frame_count = static_cast<int>(video.frames.size());
  if (schedule.clips.empty() || schedule.clips.front().start != 0 ||
      schedule.clips.back().end != frame_count) {
    throw Error(ErrorCode::kShapeError, video.video_id + ": schedule does not cover video");
  }
  if (mode == PromptMode::kBox && !video.init_box) {
    throw Error(ErrorCode::kMissingAnnotation, video.video_id + ": box mode needs \"init\"");
  }
  if (mode == PromptMode::kExpression && !video.expression) {
    throw Error(ErrorCode::kMissingAnnotation,
                video.video_id + ": expression mode needs \"expression\"");
  }

  TrackingOutcome out;
  out.video_id = video.video_id;
  out.expression = video.expression;
  std::vector<std::optional<QuantBox>> boxes(frame_count);
  std::optional<QuantBox> handoff = video.init_box;

  for (std::size_t c = 0; c < schedule.clips.size(); ++c) {
    const Clip& clip = schedule.clips[c];
    TrackRequest req;
    req.id = video.video_id + "#" + std::to_string(c);
    req.video_id = video.video_id;
    req.frames.assign(video.frames.begin() + clip.start, video.frames.begin() + clip.end);
    if (c == 0 && mode == PromptMode::kExpression) {
      req.mode = PromptMode::kExpression;
      req.init = *video.expression;
      req.prompt_template = options.expression_prompt;
    } else {
      req.mode = PromptMode::kBox;
      req.init = Serialize(*handoff);
      req.prompt_template = options.box_prompt;
      if (mode == PromptMode::kExpression) req.expression = video.expression;
    }

    const TrackResponse resp = CallWithRetry(client, req, options.retries);
    for (int j = 0; j < clip.size(); ++j) {
      const int frame = clip.start + j;
      const std::vector<QuantBox> found = ParseCoords(resp.per_frame[j]);
      if (!found.empty()) {
        boxes[frame] = found.front();
        continue;
      }
      const std::string where = req.id + " frame " + std::to_string(frame);
      if (options.strict) {
        throw Error(ErrorCode::kParseError, where + ": no coordinates in response");
      }
      // The overlap frame keeps the earlier clip's prediction.
      if (boxes[frame]) {
        out.warnings.push_back(where + ": unparseable, kept earlier clip's box");
      } else if (frame > 0 && boxes[frame - 1]) {
        boxes[frame] = boxes[frame - 1];
        out.warnings.push_back(where + ": unparseable, repeated previous box");
      } else if (video.init_box) {
        boxes[frame] = video.init_box;
        out.warnings.push_back(where + ": unparseable, used init box");
      } else {
        boxes[frame] = QuantBox{{0, 0, kQuantLevels - 1, kQuantLevels - 1}};
        out.warnings.push_back(where + ": unparseable, used full frame");
      }
      LogWarn(out.warnings.back());
    }
    handoff = boxes[clip.end - 1];
  }

  out.boxes.reserve(frame_count);
  for (const auto& b : boxes) out.boxes.push_back(*b);
  return out;
}

std::vector<TrackingOutcome> TrackAll(const std::vector<VideoMeta>& videos,
                                      PromptMode mode, const ClientFactory& factory,
                                      const TrackingOptions& options, int parallel) {
  std::vector<TrackingOutcome> results(videos.size());
  const std::size_t workers = std::clamp<std::size_t>(
      parallel > 0 ? parallel : 1, 1, std::max<std::size_t>(1, videos.size()));
  std::atomic<std::size_t> next{0};
  std::atomic<bool> failed{false};
  std::exception_ptr error;
  std::mutex error_mu;

  auto worker = [&] {
    try {
      std::unique_ptr<TrackingClient> client = factory();
      for (std::size_t i = next++; i < videos.size() && !failed; i = next++) {
        const VideoMeta& v = videos[i];
        const ClipSchedule schedule = ScheduleClips(
            static_cast<int>(v.frames.size()), options.clip_len, options.max_unsplit);
        results[i] = RunTracking(v, mode, *client, schedule, options);
      }
    } catch (...) {
      std::lock_guard<std::mutex> lock(error_mu);
      if (!error) error = std::current_exception();
      failed = true;
    }
  };
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);
  return results;
}

Json OutcomeToJson(const TrackingOutcome& outcome) {
  Json j;
  j["video_id"] = outcome.video_id;
  if (outcome.expression) j["expression"] = *outcome.expression;
  Json traj = Json::array();
  for (std::size_t f = 0; f < outcome.boxes.size(); ++f) {
    Json fj;
    fj["frame"] = f;
    fj["box"] = Serialize(outcome.boxes[f]);
    traj.push_back(std::move(fj));
  }
  j["trajectory"] = std::move(traj);
  return j;
}

}  // namespace trackkit::harness

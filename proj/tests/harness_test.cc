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

#include <cmath>
#include <map>
#include <numeric>
#include <random>

#include <gtest/gtest.h>

#include "trackkit/error.h"

namespace trackkit::harness {
namespace {

VideoMeta Video(int frames, QuantBox init) {
  VideoMeta v;
  v.video_id = "vid";
  for (int i = 0; i < frames; ++i) v.frames.push_back("frame_" + std::to_string(i) + ".jpg");
  v.init_box = init;
  return v;
}

// Answers every frame with the init box.
class EchoClient : public TrackingClient {
 public:
  TrackResponse Track(const TrackRequest& r) override {
    requests.push_back(r);
    return {r.id, std::vector<std::string>(r.frames.size(), "The object is at " + r.init + ".")};
  }
  std::vector<TrackRequest> requests;
};

// Moves x1 and x2 right by one quantized unit per frame from the init box.
class ShiftClient : public TrackingClient {
 public:
  TrackResponse Track(const TrackRequest& r) override {
    const QuantBox init = ParseQuantBox(r.init);
    TrackResponse out{r.id, {}};
    for (std::size_t j = 0; j < r.frames.size(); ++j) {
      QuantBox q = init;
      q.v[0] += int(j);
      q.v[2] += int(j);
      out.per_frame.push_back(Serialize(q));
    }
    return out;
  }
};

// Encodes (call number, position in clip) so the source of each stitched box
// is visible.
class TaggedClient : public TrackingClient {
 public:
  TrackResponse Track(const TrackRequest& r) override {
    TrackResponse out{r.id, {}};
    for (std::size_t j = 0; j < r.frames.size(); ++j) {
      out.per_frame.push_back(Serialize({{calls, int(j), 50, 50}}));
    }
    ++calls;
    return out;
  }
  int calls = 0;
};

class GarbageOnFrameClient : public EchoClient {
 public:
  explicit GarbageOnFrameClient(std::string bad) : bad_(std::move(bad)) {}
  TrackResponse Track(const TrackRequest& r) override {
    TrackResponse out{r.id, {}};
    const QuantBox init = ParseQuantBox(r.init);
    for (std::size_t j = 0; j < r.frames.size(); ++j) {
      QuantBox q = init;
      q.v[1] += int(j);
      out.per_frame.push_back(r.frames[j] == bad_ ? "I lost it." : Serialize(q));
    }
    return out;
  }

 private:
  std::string bad_;
};

class FlakyClient : public TrackingClient {
 public:
  explicit FlakyClient(int failures) : failures_(failures) {}
  TrackResponse Track(const TrackRequest& r) override {
    ++attempts;
    if (failures_-- > 0) throw Error(ErrorCode::kClientError, "connection reset");
    return {r.id, std::vector<std::string>(r.frames.size(), r.init)};
  }
  int attempts = 0;

 private:
  int failures_;
};

TEST(ScheduleTest, Examples) {
  EXPECT_EQ(ScheduleClips(32).clips, (std::vector<Clip>{{0, 32}}));
  EXPECT_EQ(ScheduleClips(8).clips, (std::vector<Clip>{{0, 8}}));
  EXPECT_EQ(ScheduleClips(40).clips,
            (std::vector<Clip>{{0, 8}, {7, 15}, {14, 22}, {21, 29}, {28, 36}, {35, 40}}));
  EXPECT_EQ(ScheduleClips(33).clips.back().size(), 5);
  try {
    ScheduleClips(1);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kTooShort);
  }
}

TEST(ScheduleTest, CoverOverlapAndLengthForAllCounts) {
  for (int n = 2; n <= 500; ++n) {
    const auto clips = ScheduleClips(n).clips;
    ASSERT_FALSE(clips.empty());
    EXPECT_EQ(clips.front().start, 0);
    EXPECT_EQ(clips.back().end, n);
    if (n <= kMaxUnsplitFrames) {
      EXPECT_EQ(clips.size(), 1u);
      continue;
    }
    for (std::size_t i = 0; i < clips.size(); ++i) {
      EXPECT_GE(clips[i].size(), 2) << n;
      EXPECT_LE(clips[i].size(), kClipLength) << n;
      if (i > 0) EXPECT_EQ(clips[i - 1].end - 1, clips[i].start) << n;
    }
  }
}

TEST(UniformSampleTest, Examples) {
  std::vector<int> all(16);
  std::iota(all.begin(), all.end(), 0);
  EXPECT_EQ(UniformSample(16), all);
  std::vector<int> odd;
  for (int i = 1; i < 32; i += 2) odd.push_back(i);
  EXPECT_EQ(UniformSample(32), odd);
  EXPECT_EQ(UniformSample(4), (std::vector<int>{0, 1, 2, 3}));
}

TEST(TrainingSampleTest, TwoFramesIsForced) {
  std::mt19937_64 rng(1);
  for (int i = 0; i < 100; ++i) EXPECT_EQ(TrainingSample(2, rng), (std::vector<int>{0, 1}));
}

TEST(TrainingSampleTest, SeededAndReproducible) {
  std::mt19937_64 a(77), b(77);
  for (int i = 0; i < 50; ++i) EXPECT_EQ(TrainingSample(1000, a), TrainingSample(1000, b));
}

TEST(TrainingSampleTest, DistributionAndFeasibility) {
  std::mt19937_64 rng(2024);
  constexpr int kDraws = 100000;
  std::map<int, int> counts;
  std::map<int, int> intervals;
  for (int i = 0; i < kDraws; ++i) {
    const std::vector<int> s = TrainingSample(500, rng);
    ASSERT_GE(s.size(), 2u);
    ASSERT_LE(s.size(), 8u);
    const int gap = s[1] - s[0];
    ASSERT_GE(gap, 1);
    ASSERT_LE(gap, 60);
    for (std::size_t j = 1; j < s.size(); ++j) ASSERT_EQ(s[j] - s[j - 1], gap);
    ASSERT_GE(s.front(), 0);
    ASSERT_LT(s.back(), 500);
    ++counts[int(s.size())];
    ++intervals[gap];
  }
  const double p = 1.0 / 7.0;
  const double sigma = std::sqrt(kDraws * p * (1 - p));
  for (int c = 2; c <= 8; ++c) {
    EXPECT_LE(std::abs(counts[c] - kDraws * p), 3 * sigma) << "count " << c;
  }
  EXPECT_EQ(intervals.size(), 60u);
}

TEST(TrainingSampleTest, ShortVideosReduceInterval) {
  std::mt19937_64 rng(3);
  for (int fc = 2; fc <= 40; ++fc) {
    for (int i = 0; i < 200; ++i) {
      const auto s = TrainingSample(fc, rng);
      ASSERT_LT(s.back(), fc);
      ASSERT_LE(int(s.size()), std::min(8, fc));
    }
  }
}

TEST(RunTrackingTest, EchoSingleClip) {
  EchoClient client;
  const QuantBox init{{10, 20, 30, 40}};
  const VideoMeta v = Video(12, init);
  const TrackingOutcome out = RunTracking(v, PromptMode::kBox, client, ScheduleClips(12));
  ASSERT_EQ(out.boxes.size(), 12u);
  for (const auto& b : out.boxes) EXPECT_EQ(b, init);
  ASSERT_EQ(client.requests.size(), 1u);
  EXPECT_EQ(client.requests[0].init, "[10,20,30,40]");
}

TEST(RunTrackingTest, EchoPropagatesInitThroughTenClips) {
  EchoClient client;
  const QuantBox init{{5, 6, 70, 80}};
  const int frames = 7 * 10 + 1;  // exactly ten 8-frame clips
  const ClipSchedule schedule = ScheduleClips(frames);
  ASSERT_EQ(schedule.clips.size(), 10u);
  const TrackingOutcome out = RunTracking(Video(frames, init), PromptMode::kBox, client, schedule);
  ASSERT_EQ(out.boxes.size(), std::size_t(frames));
  for (const auto& b : out.boxes) EXPECT_EQ(b, init);
  for (const auto& r : client.requests) EXPECT_EQ(r.init, Serialize(init));
  EXPECT_TRUE(out.warnings.empty());
}

TEST(RunTrackingTest, ScriptedShiftStitchesStraightLine) {
  ShiftClient client;
  const QuantBox init{{10, 20, 30, 40}};
  const TrackingOutcome out = RunTracking(Video(40, init), PromptMode::kBox, client, ScheduleClips(40));
  ASSERT_EQ(out.boxes.size(), 40u);
  for (int f = 0; f < 40; ++f) EXPECT_EQ(out.boxes[f], (QuantBox{{10 + f, 20, 30 + f, 40}})) << f;
}

TEST(RunTrackingTest, OverlapFrameTakesLaterClip) {
  TaggedClient client;
  const TrackingOutcome out =
      RunTracking(Video(40, {{1, 1, 2, 2}}), PromptMode::kBox, client, ScheduleClips(40));
  for (int f : {7, 14, 21, 28, 35}) {
    EXPECT_EQ(out.boxes[f].v[0], f / 7) << f;  // later clip
    EXPECT_EQ(out.boxes[f].v[1], 0) << f;      // its first frame
  }
  EXPECT_EQ(out.boxes[6], (QuantBox{{0, 6, 50, 50}}));
  EXPECT_EQ(out.boxes[39], (QuantBox{{5, 4, 50, 50}}));
}

TEST(RunTrackingTest, GarbageFrameRepeatsPreviousBox) {
  GarbageOnFrameClient client("frame_4.jpg");
  const TrackingOutcome out =
      RunTracking(Video(10, {{10, 10, 20, 20}}), PromptMode::kBox, client, ScheduleClips(10));
  EXPECT_EQ(out.boxes[4], out.boxes[3]);
  EXPECT_EQ(out.boxes[5], (QuantBox{{10, 15, 20, 20}}));
  ASSERT_EQ(out.warnings.size(), 1u);
  EXPECT_NE(out.warnings[0].find("frame 4"), std::string::npos);

  TrackingOptions strict;
  strict.strict = true;
  EXPECT_THROW(RunTracking(Video(10, {{10, 10, 20, 20}}), PromptMode::kBox, client,
                           ScheduleClips(10), strict),
               Error);
}

TEST(RunTrackingTest, ExpressionModeSendsNoBoxToFirstClip) {
  EchoClient client;
  VideoMeta v = Video(40, {});
  v.init_box.reset();
  v.expression = "the red kite";
  const ClipSchedule schedule = ScheduleClips(40);
  // The echo client repeats the expression, which has no coordinates, so
  // the first clip falls back to the full frame and later clips hand it on.
  const TrackingOutcome out = RunTracking(v, PromptMode::kExpression, client, schedule);
  ASSERT_EQ(client.requests.size(), schedule.clips.size());
  EXPECT_EQ(client.requests[0].mode, PromptMode::kExpression);
  EXPECT_EQ(client.requests[0].init, "the red kite");
  EXPECT_EQ(ParseCoords(client.requests[0].init).size(), 0u);
  EXPECT_EQ(client.requests[1].mode, PromptMode::kBox);
  EXPECT_EQ(client.requests[1].expression, std::optional<std::string>("the red kite"));
  EXPECT_EQ(out.boxes.front(), (QuantBox{{0, 0, 99, 99}}));
}

TEST(RunTrackingTest, RetriesThenAborts) {
  FlakyClient ok_after_two(2);
  TrackingOptions opts;
  opts.retries = 2;
  const auto out = RunTracking(Video(5, {{1, 1, 2, 2}}), PromptMode::kBox, ok_after_two,
                               ScheduleClips(5), opts);
  EXPECT_EQ(ok_after_two.attempts, 3);
  EXPECT_EQ(out.boxes.size(), 5u);
  FlakyClient never(100);
  try {
    RunTracking(Video(5, {{1, 1, 2, 2}}), PromptMode::kBox, never, ScheduleClips(5), opts);
    FAIL();
  } catch (const Error& e) {
    EXPECT_EQ(e.code(), ErrorCode::kClientError);
  }
  EXPECT_EQ(never.attempts, 3);
}

TEST(TrackAllTest, ParallelKeepsInputOrder) {
  std::vector<VideoMeta> videos;
  for (int i = 0; i < 6; ++i) {
    VideoMeta v = Video(20 + i * 7, {{i, i, 10 + i, 10 + i}});
    v.video_id = "v" + std::to_string(i);
    videos.push_back(v);
  }
  const auto outcomes = TrackAll(videos, PromptMode::kBox,
                                 [] { return std::make_unique<ShiftClient>(); }, {}, 3);
  ASSERT_EQ(outcomes.size(), videos.size());
  for (std::size_t i = 0; i < videos.size(); ++i) {
    EXPECT_EQ(outcomes[i].video_id, videos[i].video_id);
    EXPECT_EQ(outcomes[i].boxes.size(), videos[i].frames.size());
    EXPECT_EQ(outcomes[i].boxes.back().v[0], int(i) + int(videos[i].frames.size()) - 1);
  }
}

TEST(ProtocolTest, RequestResponseRoundTrip) {
  TrackRequest r{"a#0", "a", {"f0", "f1"}, PromptMode::kBox, "[1,2,3,4]", "t {init}", "cat"};
  const TrackRequest back = RequestFromJson(RequestToJson(r));
  EXPECT_EQ(back.id, r.id);
  EXPECT_EQ(back.frames, r.frames);
  EXPECT_EQ(back.init, r.init);
  EXPECT_EQ(back.expression, r.expression);
  const TrackResponse resp{"a#0", {"[1,2,3,4]", "x"}};
  EXPECT_EQ(ResponseFromJson(ResponseToJson(resp)).per_frame, resp.per_frame);
  EXPECT_THROW(ResponseFromJson(Json::parse(R"({"id":"x","per_frame":[1]})")), Error);
}

}  // namespace
}  // namespace trackkit::harness

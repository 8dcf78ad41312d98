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

// Shared test corpora: the hand-built pipeline fixture, a seeded random
// corpus for threshold sweeps, and small file helpers.

#ifndef TRACKKIT_TESTS_FIXTURES_H_
#define TRACKKIT_TESTS_FIXTURES_H_

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include <unistd.h>

#include "trackkit/jsonl.h"
#include "trackkit/pipeline.h"
#include "trackkit/trajectory.h"

namespace fixtures {

using trackkit::Box;
using trackkit::Json;
using trackkit::TrackedFrame;
using trackkit::Trajectory;
using trackkit::pipeline::ChunkCandidate;
using trackkit::pipeline::Grounding;

struct Corpus {
  std::vector<ChunkCandidate> chunks;
  std::vector<Trajectory> trajectories;
};

inline constexpr int kFrames = 21;
inline constexpr double kSide = 0.1;

// Slow rightward drift: 0.0005 per frame, 0.1 x 0.1 box.
inline Box LineBox(int frame, double x0 = 0.2, double y0 = 0.3) {
  const double x = x0 + 0.0005 * frame;
  return {x, y0, x + kSide, y0 + kSide};
}

inline Trajectory LineTrajectory(const std::string& video, const std::string& chunk) {
  Trajectory t{video, chunk, {}};
  for (int f = 0; f < kFrames; ++f) t.frames.push_back({f, LineBox(f), 0.9});
  return t;
}

inline ChunkCandidate Candidate(const std::string& video, const std::string& chunk,
                                const std::string& head,
                                std::vector<trackkit::pipeline::TokenTag> tokens) {
  ChunkCandidate c;
  c.video_id = video;
  c.caption = chunk + " in the video";
  c.chunk_text = chunk;
  c.head_lemma = head;
  c.tokens = std::move(tokens);
  c.first = Grounding{0, LineBox(0), 0.9};
  c.middle = Grounding{10, LineBox(10), 0.9};
  c.last = Grounding{kFrames - 1, LineBox(kFrames - 1), 0.9};
  return c;
}

// One survivor plus one candidate per failure: virtual head, plural, weak
// grounding (0.60), weak tracking frame (0.79), a 5x-width jump at frame 10,
// and a last-frame grounding at IoU 0.29 with the track.
inline Corpus PipelineCorpus(bool include_plural = true) {
  Corpus c;
  auto add = [&](ChunkCandidate cand) {
    c.trajectories.push_back(LineTrajectory(cand.video_id, cand.chunk_text));
    c.chunks.push_back(std::move(cand));
    return &c.trajectories.back();
  };
  add(Candidate("vid_a", "the time", "time", {{"the", "DT"}, {"time", "NN"}}));
  if (include_plural) {
    add(Candidate("vid_b", "two dogs", "dog", {{"two", "CD"}, {"dogs", "NNS"}}));
  }
  {
    auto cand = Candidate("vid_c", "a red car", "car", {{"a", "DT"}, {"red", "JJ"}, {"car", "NN"}});
    cand.first->score = 0.60;
    add(cand);
  }
  {
    Trajectory* t = add(Candidate("vid_d", "a blue ball", "ball",
                                  {{"a", "DT"}, {"blue", "JJ"}, {"ball", "NN"}}));
    t->frames[7].score = 0.79;
  }
  {
    Trajectory* t = add(Candidate("vid_e", "a green kite", "kite",
                                  {{"a", "DT"}, {"green", "JJ"}, {"kite", "NN"}}));
    t->frames[10].box.x1 += 5 * kSide;
    t->frames[10].box.x2 += 5 * kSide;
  }
  {
    auto cand = Candidate("vid_f", "a white boat", "boat",
                          {{"a", "DT"}, {"white", "JJ"}, {"boat", "NN"}});
    // Shift by 0.055 of a 0.1 box: IoU = 0.0045 / 0.0155.
    cand.last->box.x1 += 0.055;
    cand.last->box.x2 += 0.055;
    add(cand);
  }
  add(Candidate("vid_g", "a black cat", "cat", {{"a", "DT"}, {"black", "JJ"}, {"cat", "NN"}}));
  return c;
}

// Candidates with spread-out grounding scores, track scores and last-frame
// offsets so every gate is active somewhere in [0, 1].
inline Corpus RandomCorpus(int count, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  Corpus c;
  for (int i = 0; i < count; ++i) {
    const std::string video = "rand_" + std::to_string(i);
    auto cand = Candidate(video, "a small bird", "bird",
                          {{"a", "DT"}, {"small", "JJ"}, {"bird", "NN"}});
    cand.first->score = unit(rng);
    const double shift = 0.1 * unit(rng);
    cand.last->box.x1 += shift;
    cand.last->box.x2 += shift;
    Trajectory t = LineTrajectory(video, cand.chunk_text);
    const double floor = unit(rng);
    for (auto& f : t.frames) f.score = floor + (1.0 - floor) * unit(rng);
    c.chunks.push_back(cand);
    c.trajectories.push_back(t);
  }
  return c;
}

inline Json GroundingJson(const Grounding& g) {
  Json j;
  j["frame"] = g.frame;
  j["box"] = trackkit::BoxToJson(g.box);
  j["score"] = g.score;
  return j;
}

inline Json ChunkJson(const ChunkCandidate& c) {
  Json j;
  j["video_id"] = c.video_id;
  j["caption"] = c.caption;
  j["chunk_text"] = c.chunk_text;
  j["head_lemma"] = c.head_lemma;
  Json tokens = Json::array();
  for (const auto& t : c.tokens) tokens.push_back({{"text", t.text}, {"tag", t.tag}});
  j["tokens"] = tokens;
  Json g;
  if (c.first) g["first"] = GroundingJson(*c.first);
  if (c.middle) g["middle"] = GroundingJson(*c.middle);
  if (c.last) g["last"] = GroundingJson(*c.last);
  j["groundings"] = g;
  return j;
}

inline Json TrajectoryJson(const Trajectory& t) {
  Json j;
  j["video_id"] = t.video_id;
  j["chunk_text"] = t.chunk_text;
  Json frames = Json::array();
  for (const auto& f : t.frames) {
    frames.push_back({{"frame", f.frame}, {"box", trackkit::BoxToJson(f.box)}, {"score", f.score}});
  }
  j["frames"] = frames;
  return j;
}

inline void WriteCorpus(const Corpus& c, const std::string& chunks_path,
                        const std::string& tracks_path) {
  std::string chunks, tracks;
  for (const auto& ch : c.chunks) chunks += ChunkJson(ch).dump() + "\n";
  for (const auto& t : c.trajectories) tracks += TrajectoryJson(t).dump() + "\n";
  trackkit::WriteTextFile(chunks_path, chunks);
  trackkit::WriteTextFile(tracks_path, tracks);
}

// Fresh per-test directory under the system temp dir.
inline std::filesystem::path ScratchDir(const std::string& name) {
  auto dir = std::filesystem::temp_directory_path() /
             ("trackkit_test_" + name + "_" + std::to_string(::getpid()));
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  return dir;
}

}  // namespace fixtures

#endif  // TRACKKIT_TESTS_FIXTURES_H_

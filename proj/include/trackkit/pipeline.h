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

// Two-step dataset construction: noun chunks with anchor-frame groundings and
// tracker trajectories (both pre-computed) are filtered into
// expression/trajectory records.

#ifndef TRACKKIT_PIPELINE_H_
#define TRACKKIT_PIPELINE_H_

#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "trackkit/geometry.h"
#include "trackkit/jsonl.h"
#include "trackkit/kalman.h"
#include "trackkit/trajectory.h"

namespace trackkit::pipeline {

struct Grounding {
  int frame = 0;
  Box box;
  double score = 0.0;
};

struct TokenTag {
  std::string text;
  std::string tag;
};

struct ChunkCandidate {
  std::string video_id;
  std::string caption;
  std::string chunk_text;
  std::string head_lemma;
  std::vector<TokenTag> tokens;
  std::optional<Grounding> first;
  std::optional<Grounding> middle;
  std::optional<Grounding> last;
};

struct FilterRules {
  std::set<std::string> abstract_nouns;
  std::set<std::string> plural_tags;
  std::set<std::string> collective_nouns;
  // Reject chunks carrying a cardinal numeral greater than one.
  bool reject_numerals = true;

  static FilterRules Defaults();
};

enum class Stage {
  kParse,
  kOrphan,
  kFilter,
  kGrounding,
  kTracking,
  kDrift,
  kConsistency,
};

std::string_view StageName(Stage s);

struct Decision {
  bool keep = true;
  Stage stage = Stage::kFilter;
  std::string reason;   // short code, empty when kept
  std::string detail;   // human-readable context

  static Decision Keep(Stage s) { return {true, s, "", ""}; }
  static Decision Reject(Stage s, std::string reason, std::string detail = "") {
    return {false, s, std::move(reason), std::move(detail)};
  }
};

struct Thresholds {
  double tau_g = 0.6;
  double tau_t = 0.8;
  double tau_iou = 0.3;
  double gate = kDefaultGateThreshold;
};

// Throws MissingAnnotation when the candidate has no token tags.
Decision FilterChunk(const ChunkCandidate& c, const FilterRules& rules);

// Keep iff the first-frame grounding score is strictly above tau_g.
Decision GateGrounding(const ChunkCandidate& c, double tau_g = 0.6);

// Keep iff every frame's tracking score is strictly above tau_t.
Decision GateTracking(const Trajectory& t, double tau_t = 0.8);

// Reject iff either IoU is strictly below tau_iou.
Decision ConsistencyGate(double iou_mid, double iou_last, double tau_iou = 0.3);

struct ConsistencyResult {
  Decision decision;
  double iou_mid = 0.0;
  double iou_last = 0.0;
};

// Compares middle/last groundings with the tracked boxes at those frames.
ConsistencyResult ConsistencyCheck(const Trajectory& t, const ChunkCandidate& c,
                                   double tau_iou = 0.3);

struct Provenance {
  double grounding_score = 0.0;
  double grounding_mid_score = 0.0;
  double grounding_last_score = 0.0;
  double min_track_score = 0.0;
  double iou_mid = 0.0;
  double iou_last = 0.0;
  double max_gate_distance = 0.0;
  bool drifted = false;
};

struct TrackletRecord {
  std::string video_id;
  std::string expression;
  std::vector<std::pair<int, QuantBox>> trajectory;
  Provenance provenance;
};

struct Rejection {
  std::string video_id;
  std::string chunk_text;
  Stage stage = Stage::kFilter;
  std::string reason;
  std::string detail;
};

struct BuildResult {
  std::vector<TrackletRecord> records;
  std::vector<Rejection> rejections;
  // Trajectories with no matching candidate (or duplicates of a key).
  std::vector<Rejection> orphans;
};

// filter -> grounding -> tracking -> drift -> consistency, first failure
// wins. Candidates are processed on `parallel` workers; output is sorted by
// (video_id, chunk_text) with input order breaking ties.
BuildResult BuildRecords(const std::vector<ChunkCandidate>& chunks,
                         const std::vector<Trajectory>& trajectories,
                         const FilterRules& rules, const Thresholds& thresholds,
                         int parallel = 1);

// Re-checks every gate postcondition against emitted provenance.
bool ProvenanceSatisfies(const Provenance& p, const Thresholds& thresholds);

ChunkCandidate ChunkFromJson(const Json& j);
Trajectory TrajectoryFromJson(const Json& j);
Json RecordToJson(const TrackletRecord& r);
Json RejectionToJson(const Rejection& r);

// One lemma per line; blank lines and '#' comments ignored.
std::set<std::string> ReadStoplist(const std::string& path);

struct BuildFiles {
  std::string chunks_path;
  std::string tracks_path;
  std::string out_path;
  std::string reject_log_path;
  bool strict = false;
  int parallel = 1;
};

struct BuildStats {
  std::size_t records = 0;
  std::size_t rejections = 0;
  std::size_t orphans = 0;
  std::size_t malformed_lines = 0;
};

// Reads both inputs, runs BuildRecords and writes the records file and the
// rejection log (rejections, then orphans, then malformed input lines).
BuildStats BuildDatasetFiles(const BuildFiles& files, const FilterRules& rules,
                             const Thresholds& thresholds);

inline constexpr const char* kStageOrder =
    "filter,grounding,tracking,drift,consistency";

}  // namespace trackkit::pipeline

#endif  // TRACKKIT_PIPELINE_H_

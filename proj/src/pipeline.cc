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

#include "trackkit/pipeline.h"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>
#include <thread>
#include <variant>

#include "trackkit/error.h"
#include "trackkit/log.h"

namespace trackkit::pipeline {
namespace {

std::string Lower(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

// Value of a cardinal token, or nullopt when it is not a plain number.
std::optional<double> CardinalValue(const std::string& text) {
  static const std::map<std::string, double> kWords = {
      {"zero", 0},      {"one", 1},       {"two", 2},        {"three", 3},
      {"four", 4},      {"five", 5},      {"six", 6},        {"seven", 7},
      {"eight", 8},     {"nine", 9},      {"ten", 10},       {"eleven", 11},
      {"twelve", 12},   {"thirteen", 13}, {"fourteen", 14},  {"fifteen", 15},
      {"sixteen", 16},  {"seventeen", 17}, {"eighteen", 18}, {"nineteen", 19},
      {"twenty", 20},   {"thirty", 30},   {"forty", 40},     {"fifty", 50},
      {"sixty", 60},    {"seventy", 70},  {"eighty", 80},    {"ninety", 90},
      {"hundred", 100}, {"thousand", 1000}, {"million", 1e6}, {"dozen", 12},
  };
  const std::string w = Lower(text);
  if (auto it = kWords.find(w); it != kWords.end()) return it->second;
  std::string digits;
  for (char ch : w) {
    if (ch != ',') digits += ch;
  }
  double value = 0.0;
  const auto [ptr, ec] =
      std::from_chars(digits.data(), digits.data() + digits.size(), value);
  if (ec != std::errc() || ptr != digits.data() + digits.size()) {
    return std::nullopt;
  }
  return value;
}

struct TrajectoryIndex {
  std::map<std::pair<std::string, std::string>, const Trajectory*> by_key;
  std::vector<Rejection> orphans;
};

TrajectoryIndex IndexTrajectories(const std::vector<ChunkCandidate>& chunks,
                                  const std::vector<Trajectory>& trajectories) {
  std::set<std::pair<std::string, std::string>> chunk_keys;
  for (const auto& c : chunks) chunk_keys.emplace(c.video_id, c.chunk_text);
  TrajectoryIndex index;
  for (const auto& t : trajectories) {
    auto key = std::make_pair(t.video_id, t.chunk_text);
    if (!chunk_keys.count(key)) {
      index.orphans.push_back(
          {t.video_id, t.chunk_text, Stage::kOrphan, "orphan_trajectory", ""});
    } else if (!index.by_key.emplace(key, &t).second) {
      index.orphans.push_back({t.video_id, t.chunk_text, Stage::kOrphan,
                               "duplicate_trajectory", ""});
    }
  }
  return index;
}

using Outcome = std::variant<TrackletRecord, Rejection>;

Rejection MakeRejection(const ChunkCandidate& c, const Decision& d) {
  return {c.video_id, c.chunk_text, d.stage, d.reason, d.detail};
}

Outcome ProcessCandidate(const ChunkCandidate& c, const Trajectory* t,
                         const FilterRules& rules, const Thresholds& th) {
  auto reject = [&](Stage s, std::string reason, std::string detail = "") {
    return Outcome(Rejection{c.video_id, c.chunk_text, s, std::move(reason),
                             std::move(detail)});
  };
  try {
    if (Decision d = FilterChunk(c, rules); !d.keep) return MakeRejection(c, d);
  } catch (const Error& e) {
    return reject(Stage::kFilter, "missing_annotation", e.what());
  }
  try {
    if (Decision d = GateGrounding(c, th.tau_g); !d.keep) {
      return MakeRejection(c, d);
    }
  } catch (const Error& e) {
    return reject(Stage::kGrounding, "missing_annotation", e.what());
  }
  if (t == nullptr) return reject(Stage::kTracking, "missing_trajectory");
  try {
    if (Decision d = GateTracking(*t, th.tau_t); !d.keep) {
      return MakeRejection(c, d);
    }
  } catch (const Error& e) {
    return reject(Stage::kTracking, "empty_trajectory", e.what());
  }

  DriftReport drift;
  try {
    drift = DriftCheck(*t, th.gate);
  } catch (const Error& e) {
    return reject(Stage::kDrift, "too_short", e.what());
  }
  if (drift.drifted) {
    std::ostringstream detail;
    detail << "flagged frames";
    for (int f : drift.flagged_frames) detail << ' ' << f;
    detail << "; max gate distance " << drift.max_gate_distance;
    return reject(Stage::kDrift, "extreme_drift", detail.str());
  }

  ConsistencyResult consistency;
  try {
    consistency = ConsistencyCheck(*t, c, th.tau_iou);
  } catch (const Error& e) {
    const bool anchor = e.code() == ErrorCode::kMissingAnchorFrame;
    return reject(Stage::kConsistency,
                  anchor ? "missing_anchor_frame" : "missing_annotation",
                  e.what());
  }
  if (!consistency.decision.keep) return MakeRejection(c, consistency.decision);

  TrackletRecord r;
  r.video_id = c.video_id;
  r.expression = c.chunk_text;
  double min_score = 1.0;
  for (const auto& f : t->frames) {
    r.trajectory.emplace_back(f.frame, Quantize(f.box));
    min_score = std::min(min_score, f.score);
  }
  r.provenance.grounding_score = c.first->score;
  r.provenance.grounding_mid_score = c.middle->score;
  r.provenance.grounding_last_score = c.last->score;
  r.provenance.min_track_score = min_score;
  r.provenance.iou_mid = consistency.iou_mid;
  r.provenance.iou_last = consistency.iou_last;
  r.provenance.max_gate_distance = drift.max_gate_distance;
  r.provenance.drifted = drift.drifted;
  return r;
}

template <typename T>
void SortByKey(std::vector<T>& items) {
  std::stable_sort(items.begin(), items.end(), [](const T& a, const T& b) {
    if (a.video_id != b.video_id) return a.video_id < b.video_id;
    if constexpr (std::is_same_v<T, TrackletRecord>) {
      return a.expression < b.expression;
    } else {
      return a.chunk_text < b.chunk_text;
    }
  });
}

Grounding GroundingFromJson(const Json& j) {
  Grounding g;
  g.frame = RequireInt(j, "frame");
  g.box = BoxFromJson(RequireField(j, "box"));
  g.score = RequireNumber(j, "score");
  if (g.score < 0.0 || g.score > 1.0) {
    throw Error(ErrorCode::kParseError, "grounding score outside [0,1]");
  }
  return g;
}

}  // namespace

std::string_view StageName(Stage s) {
  switch (s) {
    case Stage::kParse: return "parse";
    case Stage::kOrphan: return "orphan";
    case Stage::kFilter: return "filter";
    case Stage::kGrounding: return "grounding";
    case Stage::kTracking: return "tracking";
    case Stage::kDrift: return "drift";
    case Stage::kConsistency: return "consistency";
  }
  return "unknown";
}

FilterRules FilterRules::Defaults() {
  FilterRules r;
  r.abstract_nouns = {
      "time",      "love",     "wind",      "life",      "idea",
      "freedom",   "happiness", "beauty",   "peace",     "nature",
      "day",       "night",    "morning",   "evening",   "moment",
      "year",      "week",     "hour",      "minute",    "season",
      "summer",    "winter",   "spring",    "autumn",    "weather",
      "air",       "light",    "sunlight",  "darkness",  "silence",
      "music",     "sound",    "noise",     "joy",       "fear",
      "hope",      "success",  "business",  "concept",   "energy",
      "power",     "motion",   "movement",  "speed",     "background",
      "view",      "scene",    "footage",   "video",     "style",
      "art",       "history",  "culture",   "future",    "past",
      "childhood", "lifestyle", "health",   "fun",       "work",
      "travel",    "memory",   "dream",     "emotion",   "sadness",
      "anger",     "space",    "romance",   "relaxation", "vacation",
  };
  r.plural_tags = {"NNS", "NNPS"};
  r.collective_nouns = {"family", "people", "crowd",  "group", "team",
                        "couple", "herd",   "flock",  "audience", "band",
                        "army",   "fleet",  "pair",   "swarm", "staff",
                        "troop",  "gang",   "public", "police", "cattle"};
  return r;
}

Decision FilterChunk(const ChunkCandidate& c, const FilterRules& rules) {
  if (c.tokens.empty()) {
    throw Error(ErrorCode::kMissingAnnotation,
                "no token tags for chunk '" + c.chunk_text + "'");
  }
  const std::string lemma = Lower(c.head_lemma);
  if (rules.abstract_nouns.count(lemma)) {
    return Decision::Reject(Stage::kFilter, "virtual", "head lemma '" + lemma + "'");
  }
  for (const auto& tok : c.tokens) {
    if (rules.plural_tags.count(tok.tag)) {
      return Decision::Reject(Stage::kFilter, "plural",
                              "tag " + tok.tag + " on '" + tok.text + "'");
    }
  }
  if (rules.collective_nouns.count(lemma)) {
    return Decision::Reject(Stage::kFilter, "plural", "collective noun '" + lemma + "'");
  }
  for (const auto& tok : c.tokens) {
    if (rules.collective_nouns.count(Lower(tok.text))) {
      return Decision::Reject(Stage::kFilter, "plural",
                              "collective noun '" + tok.text + "'");
    }
  }
  if (rules.reject_numerals) {
    for (const auto& tok : c.tokens) {
      if (tok.tag != "CD") continue;
      const auto value = CardinalValue(tok.text);
      if (value && *value > 1.0) {
        return Decision::Reject(Stage::kFilter, "plural",
                                "cardinal '" + tok.text + "'");
      }
    }
  }
  return Decision::Keep(Stage::kFilter);
}

Decision GateGrounding(const ChunkCandidate& c, double tau_g) {
  if (!c.first) {
    throw Error(ErrorCode::kMissingAnnotation,
                "no first-frame grounding for '" + c.chunk_text + "'");
  }
  if (c.first->score > tau_g) return Decision::Keep(Stage::kGrounding);
  std::ostringstream os;
  os << "score " << c.first->score << " <= " << tau_g;
  return Decision::Reject(Stage::kGrounding, "low_grounding_score", os.str());
}

Decision GateTracking(const Trajectory& t, double tau_t) {
  if (t.empty()) {
    throw Error(ErrorCode::kEmptyTrajectory, t.video_id + "/" + t.chunk_text);
  }
  for (const auto& f : t.frames) {
    if (!(f.score > tau_t)) {
      std::ostringstream os;
      os << "frame " << f.frame << " score " << f.score << " <= " << tau_t;
      return Decision::Reject(Stage::kTracking, "low_tracking_score", os.str());
    }
  }
  return Decision::Keep(Stage::kTracking);
}

Decision ConsistencyGate(double iou_mid, double iou_last, double tau_iou) {
  if (iou_mid < tau_iou || iou_last < tau_iou) {
    std::ostringstream os;
    os << "iou_mid " << iou_mid << ", iou_last " << iou_last << " vs " << tau_iou;
    return Decision::Reject(Stage::kConsistency, "low_iou", os.str());
  }
  return Decision::Keep(Stage::kConsistency);
}

ConsistencyResult ConsistencyCheck(const Trajectory& t, const ChunkCandidate& c,
                                   double tau_iou) {
  if (!c.middle || !c.last) {
    throw Error(ErrorCode::kMissingAnnotation,
                "middle/last grounding missing for '" + c.chunk_text + "'");
  }
  auto tracked_at = [&](int frame) -> const Box& {
    const auto it = std::lower_bound(
        t.frames.begin(), t.frames.end(), frame,
        [](const TrackedFrame& f, int value) { return f.frame < value; });
    if (it == t.frames.end() || it->frame != frame) {
      throw Error(ErrorCode::kMissingAnchorFrame,
                  "trajectory lacks frame " + std::to_string(frame));
    }
    return it->box;
  };
  ConsistencyResult r;
  r.iou_mid = Iou(c.middle->box, tracked_at(c.middle->frame));
  r.iou_last = Iou(c.last->box, tracked_at(c.last->frame));
  r.decision = ConsistencyGate(r.iou_mid, r.iou_last, tau_iou);
  return r;
}

BuildResult BuildRecords(const std::vector<ChunkCandidate>& chunks,
                         const std::vector<Trajectory>& trajectories,
                         const FilterRules& rules, const Thresholds& thresholds,
                         int parallel) {
  TrajectoryIndex index = IndexTrajectories(chunks, trajectories);
  std::vector<std::optional<Outcome>> outcomes(chunks.size());

  auto work = [&](std::size_t i) {
    const ChunkCandidate& c = chunks[i];
    const auto it = index.by_key.find({c.video_id, c.chunk_text});
    const Trajectory* t = it == index.by_key.end() ? nullptr : it->second;
    outcomes[i] = ProcessCandidate(c, t, rules, thresholds);
  };

  const std::size_t workers = std::clamp<std::size_t>(
      parallel > 0 ? parallel : std::thread::hardware_concurrency(), 1,
      std::max<std::size_t>(1, chunks.size()));
  if (workers <= 1) {
    for (std::size_t i = 0; i < chunks.size(); ++i) work(i);
  } else {
    std::atomic<std::size_t> next{0};
    std::vector<std::thread> pool;
    for (std::size_t w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (std::size_t i = next++; i < chunks.size(); i = next++) work(i);
      });
    }
    for (auto& th : pool) th.join();
  }

  BuildResult result;
  for (auto& o : outcomes) {
    if (auto* rec = std::get_if<TrackletRecord>(&*o)) {
      result.records.push_back(std::move(*rec));
    } else {
      result.rejections.push_back(std::get<Rejection>(std::move(*o)));
    }
  }
  result.orphans = std::move(index.orphans);
  SortByKey(result.records);
  SortByKey(result.rejections);
  SortByKey(result.orphans);
  return result;
}

bool ProvenanceSatisfies(const Provenance& p, const Thresholds& th) {
  return p.grounding_score > th.tau_g && p.min_track_score > th.tau_t &&
         p.iou_mid >= th.tau_iou && p.iou_last >= th.tau_iou && !p.drifted &&
         p.max_gate_distance <= th.gate;
}

ChunkCandidate ChunkFromJson(const Json& j) {
  ChunkCandidate c;
  c.video_id = RequireString(j, "video_id");
  c.chunk_text = RequireString(j, "chunk_text");
  c.caption = j.value("caption", "");
  c.head_lemma = j.value("head_lemma", "");
  if (j.contains("tokens")) {
    for (const auto& tok : RequireField(j, "tokens")) {
      c.tokens.push_back({RequireString(tok, "text"), RequireString(tok, "tag")});
    }
  }
  if (j.contains("groundings")) {
    const Json& g = j.at("groundings");
    if (g.contains("first")) c.first = GroundingFromJson(g.at("first"));
    if (g.contains("middle")) c.middle = GroundingFromJson(g.at("middle"));
    if (g.contains("last")) c.last = GroundingFromJson(g.at("last"));
  }
  int prev = -1;
  for (const auto* g : {&c.first, &c.middle, &c.last}) {
    if (!*g) continue;
    if ((*g)->frame <= prev) {
      throw Error(ErrorCode::kParseError,
                  "anchor frames must increase first < middle < last");
    }
    prev = (*g)->frame;
  }
  return c;
}

Trajectory TrajectoryFromJson(const Json& j) {
  Trajectory t;
  t.video_id = RequireString(j, "video_id");
  t.chunk_text = RequireString(j, "chunk_text");
  for (const auto& f : RequireField(j, "frames")) {
    TrackedFrame tf;
    tf.frame = RequireInt(f, "frame");
    tf.box = BoxFromJson(RequireField(f, "box"));
    tf.score = RequireNumber(f, "score");
    if (tf.score < 0.0 || tf.score > 1.0) {
      throw Error(ErrorCode::kParseError, "tracking score outside [0,1]");
    }
    t.frames.push_back(tf);
  }
  ValidateTrajectory(t);
  return t;
}

Json RecordToJson(const TrackletRecord& r) {
  Json j;
  j["video_id"] = r.video_id;
  j["expression"] = r.expression;
  Json traj = Json::array();
  for (const auto& [frame, q] : r.trajectory) {
    Json f;
    f["frame"] = frame;
    f["box"] = Serialize(q);
    traj.push_back(std::move(f));
  }
  j["trajectory"] = std::move(traj);
  Json p;
  p["grounding_score"] = r.provenance.grounding_score;
  p["min_track_score"] = r.provenance.min_track_score;
  p["iou_mid"] = r.provenance.iou_mid;
  p["iou_last"] = r.provenance.iou_last;
  p["drifted"] = r.provenance.drifted;
  p["grounding_mid_score"] = r.provenance.grounding_mid_score;
  p["grounding_last_score"] = r.provenance.grounding_last_score;
  p["max_gate_distance"] = r.provenance.max_gate_distance;
  j["provenance"] = std::move(p);
  return j;
}

Json RejectionToJson(const Rejection& r) {
  Json j;
  j["video_id"] = r.video_id;
  j["chunk_text"] = r.chunk_text;
  j["stage"] = std::string(StageName(r.stage));
  j["reason"] = r.reason;
  if (!r.detail.empty()) j["detail"] = r.detail;
  return j;
}

std::set<std::string> ReadStoplist(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path);
  std::set<std::string> words;
  std::string line;
  while (std::getline(in, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.erase(hash);
    const auto b = line.find_first_not_of(" \t\r");
    if (b == std::string::npos) continue;
    const auto e = line.find_last_not_of(" \t\r");
    words.insert(Lower(line.substr(b, e - b + 1)));
  }
  if (words.empty()) {
    throw Error(ErrorCode::kParseError, "stoplist is empty: " + path);
  }
  return words;
}

BuildStats BuildDatasetFiles(const BuildFiles& files, const FilterRules& rules,
                             const Thresholds& thresholds) {
  std::vector<Rejection> malformed;
  auto load = [&](const std::string& path, const char* label, auto convert,
                  auto& sink) {
    const JsonlContents contents = ReadJsonl(path, files.strict);
    for (const auto& e : contents.errors) {
      malformed.push_back({"", "", Stage::kParse, "malformed_line",
                           std::string(label) + ":" + std::to_string(e.line_number)});
      LogWarn(e.message);
    }
    for (const auto& line : contents.lines) {
      try {
        sink.push_back(convert(line.value));
      } catch (const Error& e) {
        const std::string where = std::string(label) + ":" + std::to_string(line.line_number);
        if (files.strict) throw Error(ErrorCode::kParseError, where + ": " + e.what());
        LogWarn(where + ": " + e.what());
        malformed.push_back({"", "", Stage::kParse, "malformed_line",
                             where + ": " + e.what()});
      }
    }
  };
  std::vector<ChunkCandidate> chunks;
  std::vector<Trajectory> trajectories;
  load(files.chunks_path, "chunks", ChunkFromJson, chunks);
  load(files.tracks_path, "tracks", TrajectoryFromJson, trajectories);

  const BuildResult result =
      BuildRecords(chunks, trajectories, rules, thresholds, files.parallel);

  std::string records;
  for (const auto& r : result.records) records += RecordToJson(r).dump() + "\n";
  std::string log;
  for (const auto& r : result.rejections) log += RejectionToJson(r).dump() + "\n";
  for (const auto& r : result.orphans) log += RejectionToJson(r).dump() + "\n";
  for (const auto& r : malformed) log += RejectionToJson(r).dump() + "\n";
  WriteTextFile(files.out_path, records);
  WriteTextFile(files.reject_log_path, log);

  return {result.records.size(), result.rejections.size(),
          result.orphans.size(), malformed.size()};
}

}  // namespace trackkit::pipeline

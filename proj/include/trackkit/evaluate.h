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

// Run-level evaluation over ground-truth and prediction files.

#ifndef TRACKKIT_EVALUATE_H_
#define TRACKKIT_EVALUATE_H_

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "trackkit/geometry.h"
#include "trackkit/jsonl.h"

namespace trackkit::metrics {

enum class Task { kSot, kRsot, kReg };

std::string TaskName(Task t);
Task TaskFromName(const std::string& name);

struct EvalOptions {
  Task task = Task::kSot;
  // Fail on missing predictions instead of scoring them zero.
  bool strict = false;
  // Used when a ground-truth line carries no "width"/"height".
  double frame_w = 640.0;
  double frame_h = 360.0;
  double precision_px = 20.0;
  double norm_threshold = 0.2;
};

struct TrackEntry {
  std::string video_id;
  std::optional<std::string> expression;
  std::vector<std::pair<int, Box>> frames;
  std::optional<double> width;
  std::optional<double> height;
};

struct RegEntry {
  std::string video_id;
  int frame = 0;
  QuantBox box;
  std::string text;
};

struct VideoResult {
  std::string video_id;
  std::size_t frames = 0;
  bool missing = false;
  double auc = 0.0;
  double precision = 0.0;
  double norm_precision = 0.0;
  double meteor = 0.0;
  double cider = 0.0;
};

struct EvalReport {
  EvalOptions options;
  std::vector<VideoResult> videos;  // sorted by video_id
  VideoResult aggregate;            // unweighted mean over videos
  std::vector<std::string> warnings;
};

TrackEntry TrackEntryFromJson(const Json& j);
RegEntry RegEntryFromJson(const Json& j);
Json TrackEntryToJson(const TrackEntry& e);

// SOT excludes each video's first ground-truth frame (its box is given to
// the tracker); RSOT scores every frame. Prediction frames missing for a
// ground-truth frame score IoU 0 and infinite center error.
EvalReport EvaluateTracking(const std::vector<TrackEntry>& gt,
                            const std::vector<TrackEntry>& pred,
                            const EvalOptions& options);

EvalReport EvaluateReg(const std::vector<RegEntry>& gt,
                       const std::vector<RegEntry>& pred,
                       const EvalOptions& options);

EvalReport EvaluateRun(const std::string& gt_path, const std::string& pred_path,
                       const EvalOptions& options);

Json ReportToJson(const EvalReport& report);
std::string ReportToTable(const EvalReport& report);

}  // namespace trackkit::metrics

#endif  // TRACKKIT_EVALUATE_H_

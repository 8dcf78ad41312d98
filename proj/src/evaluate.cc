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

#include "trackkit/evaluate.h"

#include <algorithm>
#include <cstdio>
#include <limits>
#include <map>
#include <set>
#include <sstream>

#include "trackkit/error.h"
#include "trackkit/log.h"
#include "trackkit/metrics.h"
#include "trackkit/text_metrics.h"
#include "trackkit/version.h"

namespace trackkit::metrics {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void Warn(EvalReport& report, const std::string& message) {
  LogWarn(message);
  report.warnings.push_back(message);
}

template <typename Entry>
std::map<std::string, const Entry*> IndexPredictions(
    const std::vector<Entry>& pred, EvalReport& report) {
  std::map<std::string, const Entry*> index;
  for (const auto& p : pred) {
    if (!index.emplace(p.video_id, &p).second) {
      Warn(report, "duplicate prediction for " + p.video_id + "; keeping the first");
    }
  }
  return index;
}

void Aggregate(EvalReport& report) {
  VideoResult agg;
  agg.video_id = "ALL";
  const double n = static_cast<double>(report.videos.size());
  for (const auto& v : report.videos) {
    agg.frames += v.frames;
    agg.auc += v.auc;
    agg.precision += v.precision;
    agg.norm_precision += v.norm_precision;
    agg.meteor += v.meteor;
    agg.cider += v.cider;
  }
  if (n > 0) {
    agg.auc /= n;
    agg.precision /= n;
    agg.norm_precision /= n;
    agg.meteor /= n;
    agg.cider /= n;
  }
  report.aggregate = agg;
}

std::string Fixed(double v, int digits = 4) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

}  // namespace

std::string TaskName(Task t) {
  switch (t) {
    case Task::kSot: return "sot";
    case Task::kRsot: return "rsot";
    case Task::kReg: return "reg";
  }
  return "?";
}

Task TaskFromName(const std::string& name) {
  if (name == "sot") return Task::kSot;
  if (name == "rsot") return Task::kRsot;
  if (name == "reg") return Task::kReg;
  throw Error(ErrorCode::kParseError, "unknown task " + name);
}

TrackEntry TrackEntryFromJson(const Json& j) {
  TrackEntry e;
  e.video_id = RequireString(j, "video_id");
  if (j.contains("expression") && j.at("expression").is_string()) {
    e.expression = j.at("expression").get<std::string>();
  }
  if (j.contains("width")) e.width = RequireNumber(j, "width");
  if (j.contains("height")) e.height = RequireNumber(j, "height");
  int prev = std::numeric_limits<int>::min();
  for (const auto& f : RequireField(j, "trajectory")) {
    const int frame = RequireInt(f, "frame");
    if (frame <= prev) {
      throw Error(ErrorCode::kParseError,
                  e.video_id + ": trajectory frames must increase");
    }
    prev = frame;
    e.frames.emplace_back(frame, Dequantize(ParseQuantBox(RequireString(f, "box"))));
  }
  return e;
}

Json TrackEntryToJson(const TrackEntry& e) {
  Json j;
  j["video_id"] = e.video_id;
  if (e.expression) j["expression"] = *e.expression;
  Json traj = Json::array();
  for (const auto& [frame, box] : e.frames) {
    Json f;
    f["frame"] = frame;
    f["box"] = Serialize(Quantize(box));
    traj.push_back(std::move(f));
  }
  j["trajectory"] = std::move(traj);
  return j;
}

RegEntry RegEntryFromJson(const Json& j) {
  RegEntry e;
  e.video_id = RequireString(j, "video_id");
  e.frame = RequireInt(j, "frame");
  e.box = ParseQuantBox(RequireString(j, "box"));
  e.text = RequireString(j, "text");
  return e;
}

EvalReport EvaluateTracking(const std::vector<TrackEntry>& gt,
                            const std::vector<TrackEntry>& pred,
                            const EvalOptions& options) {
  EvalReport report;
  report.options = options;
  const auto pred_index = IndexPredictions(pred, report);

  std::vector<const TrackEntry*> sorted;
  std::set<std::string> seen;
  for (const auto& g : gt) {
    if (!seen.insert(g.video_id).second) {
      throw Error(ErrorCode::kParseError, "duplicate ground truth for " + g.video_id);
    }
    sorted.push_back(&g);
  }
  std::sort(sorted.begin(), sorted.end(),
            [](const TrackEntry* a, const TrackEntry* b) { return a->video_id < b->video_id; });

  const bool skip_init = options.task == Task::kSot;
  for (const TrackEntry* g : sorted) {
    VideoResult v;
    v.video_id = g->video_id;
    const std::size_t first = skip_init ? 1 : 0;
    if (g->frames.size() <= first) {
      Warn(report, g->video_id + ": no evaluable frames, skipped");
      continue;
    }
    v.frames = g->frames.size() - first;

    const auto it = pred_index.find(g->video_id);
    if (it == pred_index.end()) {
      if (options.strict) {
        throw Error(ErrorCode::kMissingPrediction, g->video_id);
      }
      Warn(report, g->video_id + ": no prediction, scored as zero");
      v.missing = true;
      report.videos.push_back(v);
      continue;
    }
    std::map<int, Box> predicted(it->second->frames.begin(), it->second->frames.end());

    const double w = g->width.value_or(options.frame_w);
    const double h = g->height.value_or(options.frame_h);
    std::vector<double> overlaps, errors;
    std::size_t norm_hits = 0, missing_frames = 0;
    for (std::size_t i = first; i < g->frames.size(); ++i) {
      const auto& [frame, gt_box] = g->frames[i];
      const auto p = predicted.find(frame);
      if (p == predicted.end()) {
        ++missing_frames;
        overlaps.push_back(0.0);
        errors.push_back(kInf);
        continue;
      }
      overlaps.push_back(Iou(gt_box, p->second));
      errors.push_back(CenterError(gt_box, p->second, w, h));
      norm_hits += NormCenterError(gt_box, p->second) <= options.norm_threshold;
    }
    if (missing_frames > 0) {
      if (options.strict) {
        throw Error(ErrorCode::kMissingPrediction,
                    g->video_id + ": " + std::to_string(missing_frames) + " frames");
      }
      Warn(report, g->video_id + ": " + std::to_string(missing_frames) +
                       " frames without prediction");
    }
    v.auc = SuccessCurveFromOverlaps(overlaps).auc;
    std::vector<double> px = PrecisionThresholds();
    if (std::find(px.begin(), px.end(), options.precision_px) == px.end()) {
      px.push_back(options.precision_px);
      std::sort(px.begin(), px.end());
    }
    v.precision = PrecisionCurveFromErrors(errors, px).At(options.precision_px);
    v.norm_precision = static_cast<double>(norm_hits) / static_cast<double>(v.frames);
    report.videos.push_back(v);
  }
  Aggregate(report);
  return report;
}

EvalReport EvaluateReg(const std::vector<RegEntry>& gt,
                       const std::vector<RegEntry>& pred,
                       const EvalOptions& options) {
  EvalReport report;
  report.options = options;
  std::map<std::string, std::vector<std::string>> refs;
  for (const auto& g : gt) refs[g.video_id].push_back(g.text);
  if (refs.empty()) throw Error(ErrorCode::kEmptyCorpus, "no ground-truth expressions");
  const auto pred_index = IndexPredictions(pred, report);

  std::vector<std::string> candidates;
  std::vector<std::vector<std::string>> references;
  for (const auto& [video, texts] : refs) {
    VideoResult v;
    v.video_id = video;
    v.frames = 1;
    const auto it = pred_index.find(video);
    if (it == pred_index.end()) {
      if (options.strict) throw Error(ErrorCode::kMissingPrediction, video);
      Warn(report, video + ": no prediction, scored as zero");
      v.missing = true;
      candidates.emplace_back();
    } else {
      candidates.push_back(it->second->text);
    }
    references.push_back(texts);
    v.meteor = MeteorLite(candidates.back(), texts);
    report.videos.push_back(v);
  }
  const std::vector<double> cider = CiderScores(candidates, references);
  for (std::size_t i = 0; i < cider.size(); ++i) report.videos[i].cider = cider[i];
  Aggregate(report);
  return report;
}

EvalReport EvaluateRun(const std::string& gt_path, const std::string& pred_path,
                       const EvalOptions& options) {
  const JsonlContents gt_lines = ReadJsonl(gt_path, /*strict=*/true);
  const JsonlContents pred_lines = ReadJsonl(pred_path, options.strict);
  std::vector<std::string> parse_warnings;
  for (const auto& e : pred_lines.errors) parse_warnings.push_back(e.message);

  auto convert = [&](const JsonlContents& contents, auto fn, bool strict,
                     const std::string& label) {
    std::vector<decltype(fn(Json()))> out;
    for (const auto& line : contents.lines) {
      try {
        out.push_back(fn(line.value));
      } catch (const Error& e) {
        const std::string msg = label + ":" + std::to_string(line.line_number) + ": " + e.what();
        if (strict) throw Error(ErrorCode::kParseError, msg);
        parse_warnings.push_back(msg);
      }
    }
    return out;
  };

  EvalReport report;
  if (options.task == Task::kReg) {
    report = EvaluateReg(convert(gt_lines, RegEntryFromJson, true, gt_path),
                         convert(pred_lines, RegEntryFromJson, options.strict, pred_path),
                         options);
  } else {
    report = EvaluateTracking(
        convert(gt_lines, TrackEntryFromJson, true, gt_path),
        convert(pred_lines, TrackEntryFromJson, options.strict, pred_path), options);
  }
  for (const auto& w : parse_warnings) LogWarn(w);
  report.warnings.insert(report.warnings.begin(), parse_warnings.begin(),
                         parse_warnings.end());
  return report;
}

Json ReportToJson(const EvalReport& report) {
  const EvalOptions& o = report.options;
  const bool reg = o.task == Task::kReg;
  Json j;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["task"] = TaskName(o.task);
  Json protocol;
  if (reg) {
    protocol["meteor"] = "meteor-lite: exact+stem unigram alignment, no synonyms";
    protocol["cider"] = "CIDEr-D, n=1..4, sigma=6, corpus IDF over ground-truth videos";
  } else {
    protocol["evaluation"] = "one-pass, no re-initialization";
    protocol["init_frame_included"] = o.task == Task::kRsot;
    protocol["success_thresholds"] = "0:0.05:1, IoU > t";
    protocol["precision_threshold_px"] = o.precision_px;
    protocol["norm_precision_threshold"] = o.norm_threshold;
    protocol["default_frame_size"] = Json::array({o.frame_w, o.frame_h});
    protocol["missing_frame"] = "IoU 0, infinite center error";
  }
  protocol["aggregate"] = "unweighted mean over videos";
  protocol["strict"] = o.strict;
  j["protocol"] = std::move(protocol);

  auto video_json = [&](const VideoResult& v) {
    Json vj;
    vj["video_id"] = v.video_id;
    if (reg) {
      vj["meteor"] = v.meteor;
      vj["cider"] = v.cider;
    } else {
      vj["frames"] = v.frames;
      vj["auc"] = v.auc;
      vj["precision"] = v.precision;
      vj["norm_precision"] = v.norm_precision;
    }
    if (v.missing) vj["missing"] = true;
    return vj;
  };
  j["aggregate"] = video_json(report.aggregate);
  j["aggregate"].erase("video_id");
  j["aggregate"]["videos"] = report.videos.size();
  Json videos = Json::array();
  for (const auto& v : report.videos) videos.push_back(video_json(v));
  j["videos"] = std::move(videos);
  j["warnings"] = report.warnings;
  return j;
}

std::string ReportToTable(const EvalReport& report) {
  const bool reg = report.options.task == Task::kReg;
  std::vector<std::vector<std::string>> rows;
  if (reg) {
    rows.push_back({"video_id", "METEOR", "CIDEr"});
  } else {
    rows.push_back({"video_id", "frames", "AUC", "P", "P_Norm"});
  }
  auto add = [&](const VideoResult& v) {
    if (reg) {
      rows.push_back({v.video_id, Fixed(v.meteor), Fixed(v.cider)});
    } else {
      rows.push_back({v.video_id, std::to_string(v.frames), Fixed(v.auc),
                      Fixed(v.precision), Fixed(v.norm_precision)});
    }
  };
  for (const auto& v : report.videos) add(v);
  add(report.aggregate);

  std::vector<std::size_t> width(rows.front().size(), 0);
  for (const auto& r : rows)
    for (std::size_t c = 0; c < r.size(); ++c) width[c] = std::max(width[c], r[c].size());

  std::ostringstream os;
  os << "# task=" << TaskName(report.options.task);
  if (!reg) {
    os << " init_frame_included="
       << (report.options.task == Task::kRsot ? "true" : "false");
  }
  os << " videos=" << report.videos.size() << '\n';
  for (std::size_t i = 0; i < rows.size(); ++i) {
    if (i + 1 == rows.size()) {
      std::size_t total = 0;
      for (std::size_t w : width) total += w + 2;
      os << std::string(total - 2, '-') << '\n';
    }
    for (std::size_t c = 0; c < rows[i].size(); ++c) {
      const std::string& cell = rows[i][c];
      if (c == 0) {
        os << cell << std::string(width[c] - cell.size(), ' ');
      } else {
        os << "  " << std::string(width[c] - cell.size(), ' ') << cell;
      }
    }
    os << '\n';
  }
  return os.str();
}

}  // namespace trackkit::metrics

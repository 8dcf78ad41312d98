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

#include "trackkit/cli.h"

#include <iostream>
#include <random>
#include <sstream>

#include "CLI11.hpp"
#include "trackkit/client.h"
#include "trackkit/error.h"
#include "trackkit/evaluate.h"
#include "trackkit/harness.h"
#include "trackkit/jsonl.h"
#include "trackkit/log.h"
#include "trackkit/pipeline.h"
#include "trackkit/tselector.h"
#include "trackkit/tselector_check.h"
#include "trackkit/version.h"

namespace trackkit::cli {
namespace {

Json Header(const std::string& subcommand, Json config) {
  Json j;
  j["tool"] = kToolName;
  j["version"] = kVersion;
  j["subcommand"] = subcommand;
  j["config"] = std::move(config);
  return j;
}

struct BuildArgs {
  std::string chunks, tracks, out, reject_log, stoplist;
  pipeline::Thresholds thresholds;
  bool strict = false;
  int parallel = 1;
};

int RunBuildDataset(const BuildArgs& a, std::ostream& out) {
  pipeline::FilterRules rules = pipeline::FilterRules::Defaults();
  if (!a.stoplist.empty()) rules.abstract_nouns = pipeline::ReadStoplist(a.stoplist);

  pipeline::BuildFiles files{a.chunks, a.tracks, a.out, a.reject_log, a.strict,
                             a.parallel};
  const pipeline::BuildStats stats =
      pipeline::BuildDatasetFiles(files, rules, a.thresholds);

  Json config;
  config["chunks"] = a.chunks;
  config["tracks"] = a.tracks;
  config["out"] = a.out;
  config["reject_log"] = a.reject_log;
  config["tau_g"] = a.thresholds.tau_g;
  config["tau_t"] = a.thresholds.tau_t;
  config["tau_iou"] = a.thresholds.tau_iou;
  config["gate"] = a.thresholds.gate;
  config["stoplist"] = a.stoplist.empty() ? Json("default") : Json(a.stoplist);
  config["strict"] = a.strict;
  config["stage_order"] = pipeline::kStageOrder;
  config["grounding_gate"] = "first frame only; middle/last scores recorded";
  Json meta = Header("build-dataset", config);
  Json counts;
  counts["records"] = stats.records;
  counts["rejections"] = stats.rejections;
  counts["orphans"] = stats.orphans;
  counts["malformed_lines"] = stats.malformed_lines;
  meta["counts"] = counts;
  WriteTextFile(a.out + ".meta.json", meta.dump(2) + "\n");
  out << counts.dump() << '\n';
  return kExitOk;
}

struct EvalArgs {
  std::string task = "sot", gt, pred, out, format = "table";
  bool strict = false;
  double frame_w = 640.0, frame_h = 360.0;
};

int RunEvaluate(const EvalArgs& a, std::ostream& out) {
  metrics::EvalOptions opt;
  opt.task = metrics::TaskFromName(a.task);
  opt.strict = a.strict;
  opt.frame_w = a.frame_w;
  opt.frame_h = a.frame_h;
  const metrics::EvalReport report = metrics::EvaluateRun(a.gt, a.pred, opt);

  Json config;
  config["task"] = a.task;
  config["gt"] = a.gt;
  config["pred"] = a.pred;
  config["strict"] = a.strict;
  config["frame_width"] = a.frame_w;
  config["frame_height"] = a.frame_h;
  Json j = metrics::ReportToJson(report);
  j["config"] = config;
  if (!a.out.empty()) WriteTextFile(a.out, j.dump(2) + "\n");
  if (a.format == "json") {
    out << j.dump(2) << '\n';
  } else {
    out << metrics::ReportToTable(report);
  }
  return kExitOk;
}

struct TrackArgs {
  std::string videos, mode = "sot", endpoint, out;
  harness::TrackingOptions options;
  int parallel = 1;
};

int RunTrack(const TrackArgs& a, std::ostream& out) {
  const JsonlContents contents = ReadJsonl(a.videos, a.options.strict);
  std::vector<harness::VideoMeta> videos;
  for (const auto& e : contents.errors) LogWarn(e.message);
  for (const auto& line : contents.lines) {
    try {
      videos.push_back(harness::VideoMetaFromJson(line.value));
    } catch (const Error& e) {
      const std::string where = a.videos + ":" + std::to_string(line.line_number);
      if (a.options.strict) throw Error(ErrorCode::kParseError, where + ": " + e.what());
      LogWarn(where + ": " + e.what());
    }
  }
  const harness::PromptMode mode =
      a.mode == "rsot" ? harness::PromptMode::kExpression : harness::PromptMode::kBox;
  const auto outcomes = harness::TrackAll(
      videos, mode, harness::MakeClientFactory(a.endpoint), a.options, a.parallel);

  std::string data;
  std::size_t warnings = 0;
  for (const auto& o : outcomes) {
    data += harness::OutcomeToJson(o).dump() + "\n";
    warnings += o.warnings.size();
  }
  WriteTextFile(a.out, data);

  Json config;
  config["videos"] = a.videos;
  config["mode"] = a.mode;
  config["endpoint"] = a.endpoint;
  config["clip_len"] = a.options.clip_len;
  config["max_unsplit"] = a.options.max_unsplit;
  config["strict"] = a.options.strict;
  config["retries"] = a.options.retries;
  config["overlap_rule"] = "later clip wins";
  Json meta = Header("track", config);
  meta["tracked"] = outcomes.size();
  meta["warnings"] = warnings;
  WriteTextFile(a.out + ".meta.json", meta.dump(2) + "\n");
  out << "{\"tracked\":" << outcomes.size() << ",\"warnings\":" << warnings << "}\n";
  return kExitOk;
}

struct SelectorArgs {
  int n = 576, c = 1024, d = 4096, k = 108, hidden = 0;
  unsigned long long seed = kDefaultSeed;
  bool pure_selection = false;
  std::size_t fd_samples = 0;
  std::string save_params;
};

int RunCheckSelector(const SelectorArgs& a, std::ostream& out) {
  if (a.n < 1 || a.c < 1 || a.d < 1) {
    throw Error(ErrorCode::kShapeError, "n, c and d must be positive");
  }
  if (a.k < 1 || a.k > a.n) {
    throw Error(ErrorCode::kInvalidK, "k must lie in [1, n]");
  }
  const int hidden = a.hidden > 0 ? a.hidden : std::max(1, a.c / 4);
  auto params = tselector::SelectorParams<double>::Random(a.c, hidden, a.d, a.k, a.seed);
  params.weight_by_score = !a.pure_selection;

  std::mt19937_64 rng(a.seed + 1);
  std::normal_distribution<double> normal(0.0, 1.0);
  tselector::Matrix<double> tokens(a.n, a.c);
  for (Eigen::Index j = 0; j < tokens.cols(); ++j)
    for (Eigen::Index i = 0; i < tokens.rows(); ++i) tokens(i, j) = normal(rng);

  const auto result = tselector::Forward(tokens, params);
  const std::size_t total_coords =
      static_cast<std::size_t>(tokens.size() + params.gate_w1.size() +
                               params.gate_b1.size() + params.gate_w2.size() + 1 +
                               params.proj_w1.size() + params.proj_b1.size() +
                               params.proj_w2.size() + params.proj_b2.size());
  tselector::GradCheckOptions gopt;
  gopt.seed = a.seed;
  gopt.max_samples = a.fd_samples > 0 ? a.fd_samples
                     : total_coords <= 20000 ? 0 : 64;
  const auto check = tselector::CheckGradients(tokens, params, gopt);
  if (!a.save_params.empty()) tselector::SaveParams(params, a.save_params);

  constexpr double kTolerance = 1e-4;
  const bool tie_safe = check.score_gap > 2.0 * gopt.epsilon;
  const bool gate_ok = !a.pure_selection || check.max_abs_gate_gradient == 0.0;
  const bool pass = check.max_relative_error < kTolerance && gate_ok;

  Json config;
  config["n"] = a.n;
  config["c"] = a.c;
  config["d"] = a.d;
  config["k"] = a.k;
  config["hidden"] = hidden;
  config["alpha"] = static_cast<double>(a.k) / a.n;
  config["seed"] = a.seed;
  config["pure_selection"] = a.pure_selection;
  config["gate_mlp"] = "C->hidden->1, gelu";
  config["proj_mlp"] = "C->D->D, gelu";
  Json j = Header("check-tselector", config);
  j["output_shape"] = Json::array({result.output.rows(), result.output.cols()});
  j["selected_indices_head"] = Json::array();
  for (std::size_t i = 0; i < std::min<std::size_t>(8, result.indices.size()); ++i) {
    j["selected_indices_head"].push_back(result.indices[i]);
  }
  Json g;
  g["epsilon"] = gopt.epsilon;
  g["coordinates_checked"] = check.checked;
  g["coordinates_total"] = total_coords;
  g["max_relative_error"] = check.max_relative_error;
  g["tolerance"] = kTolerance;
  g["score_gap"] = check.score_gap;
  g["tie_safe"] = tie_safe;
  g["max_abs_gate_gradient"] = check.max_abs_gate_gradient;
  g["pass"] = pass;
  j["gradient_check"] = g;
  out << j.dump(2) << '\n';
  if (!tie_safe) LogWarn("selected set is within epsilon of a score tie");
  return pass ? kExitOk : kExitFailure;
}

int RunSchedule(int frames, int clip_len, int max_unsplit, std::ostream& out) {
  const harness::ClipSchedule s = harness::ScheduleClips(frames, clip_len, max_unsplit);
  Json config;
  config["frames"] = frames;
  config["clip_len"] = clip_len;
  config["max_unsplit"] = max_unsplit;
  Json j = Header("schedule", config);
  Json clips = Json::array();
  for (const auto& c : s.clips) clips.push_back(Json::array({c.start, c.end}));
  j["clips"] = std::move(clips);
  out << j.dump() << '\n';
  return kExitOk;
}

struct SampleArgs {
  int frames = 0, n = 16, draws = 1;
  std::string mode = "uniform";
  unsigned long long seed = kDefaultSeed;
};

int RunSampleFrames(const SampleArgs& a, std::ostream& out) {
  Json config;
  config["frames"] = a.frames;
  config["mode"] = a.mode;
  Json samples = Json::array();
  if (a.mode == "uniform") {
    config["n"] = a.n;
    samples.push_back(harness::UniformSample(a.frames, a.n));
  } else {
    config["seed"] = a.seed;
    config["draws"] = a.draws;
    std::mt19937_64 rng(a.seed);
    for (int i = 0; i < a.draws; ++i) {
      samples.push_back(harness::TrainingSample(a.frames, rng));
    }
  }
  Json j = Header("sample-frames", config);
  j["samples"] = std::move(samples);
  out << j.dump() << '\n';
  return kExitOk;
}

}  // namespace

int Dispatch(const std::vector<std::string>& args, std::ostream& out,
             std::ostream& err) {
  CLI::App app{"trackkit: dataset construction, evaluation and tracking harness"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  BuildArgs build;
  auto* build_cmd = app.add_subcommand("build-dataset", "Filter chunks and trajectories into records");
  build_cmd->add_option("--chunks", build.chunks, "Noun-chunk candidates (JSONL)")->required();
  build_cmd->add_option("--tracks", build.tracks, "Tracker trajectories (JSONL)")->required();
  build_cmd->add_option("--out", build.out, "Output records (JSONL)")->required();
  build_cmd->add_option("--reject-log", build.reject_log, "Rejection log (JSONL)")->required();
  build_cmd->add_option("--tau-g", build.thresholds.tau_g, "Grounding score gate")->capture_default_str();
  build_cmd->add_option("--tau-t", build.thresholds.tau_t, "Tracking score gate")->capture_default_str();
  build_cmd->add_option("--tau-iou", build.thresholds.tau_iou, "IoU consistency gate")->capture_default_str();
  build_cmd->add_option("--gate", build.thresholds.gate, "Kalman drift gate (squared Mahalanobis)")->capture_default_str();
  build_cmd->add_option("--stoplist", build.stoplist, "Abstract-noun stoplist, one lemma per line");
  build_cmd->add_flag("--strict", build.strict, "Abort on malformed input lines");
  build_cmd->add_option("--parallel", build.parallel, "Worker threads")->capture_default_str();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("evaluate", "Score predictions against ground truth");
  eval_cmd->add_option("--task", eval.task, "sot, rsot or reg")
      ->required()->check(CLI::IsMember({"sot", "rsot", "reg"}));
  eval_cmd->add_option("--gt", eval.gt, "Ground truth (JSONL)")->required();
  eval_cmd->add_option("--pred", eval.pred, "Predictions (JSONL)")->required();
  eval_cmd->add_option("--out", eval.out, "Write the JSON report here");
  eval_cmd->add_option("--format", eval.format, "Standard output format")
      ->check(CLI::IsMember({"table", "json"}))->capture_default_str();
  eval_cmd->add_option("--frame-width", eval.frame_w, "Default frame width in pixels")->capture_default_str();
  eval_cmd->add_option("--frame-height", eval.frame_h, "Default frame height in pixels")->capture_default_str();
  eval_cmd->add_flag("--strict", eval.strict, "Fail on missing predictions");

  TrackArgs track;
  auto* track_cmd = app.add_subcommand("track", "Run clip-based tracking against a model endpoint");
  track_cmd->add_option("--videos", track.videos, "Videos to track (JSONL)")->required();
  track_cmd->add_option("--mode", track.mode, "sot or rsot")
      ->required()->check(CLI::IsMember({"sot", "rsot"}));
  track_cmd->add_option("--endpoint", track.endpoint, "exec:<command> or tcp://host:port")->required();
  track_cmd->add_option("--out", track.out, "Predicted trajectories (JSONL)")->required();
  track_cmd->add_option("--clip-len", track.options.clip_len, "Frames per clip")->capture_default_str();
  track_cmd->add_option("--max-unsplit", track.options.max_unsplit, "Longest video tracked as one clip")->capture_default_str();
  track_cmd->add_option("--retries", track.options.retries, "Retries per clip on client failure")->capture_default_str();
  track_cmd->add_flag("--strict", track.options.strict, "Abort on unparseable frame responses");
  track_cmd->add_option("--parallel", track.parallel, "Concurrent videos (one client each)")->capture_default_str();

  SelectorArgs sel;
  auto* sel_cmd = app.add_subcommand("check-tselector", "Shape and gradient check of the token selector");
  sel_cmd->add_option("--n", sel.n, "Tokens per frame")->capture_default_str();
  sel_cmd->add_option("--c", sel.c, "Token channels")->capture_default_str();
  sel_cmd->add_option("--d", sel.d, "Output width")->capture_default_str();
  sel_cmd->add_option("--k", sel.k, "Tokens kept")->capture_default_str();
  sel_cmd->add_option("--hidden", sel.hidden, "Gate hidden width (default c/4)");
  sel_cmd->add_option("--seed", sel.seed, "Random seed")->capture_default_str();
  sel_cmd->add_option("--fd-samples", sel.fd_samples, "Coordinates to finite-difference (0 = auto)");
  sel_cmd->add_option("--save-params", sel.save_params, "Write the parameters to this file");
  sel_cmd->add_flag("--pure-selection", sel.pure_selection, "Do not scale kept tokens by their score");

  int sched_frames = 0, sched_clip = harness::kClipLength, sched_unsplit = harness::kMaxUnsplitFrames;
  auto* sched_cmd = app.add_subcommand("schedule", "Print the clip schedule for a video length");
  sched_cmd->add_option("--frames", sched_frames, "Frame count")->required();
  sched_cmd->add_option("--clip-len", sched_clip, "Frames per clip")->capture_default_str();
  sched_cmd->add_option("--max-unsplit", sched_unsplit, "Longest video kept as one clip")->capture_default_str();

  SampleArgs sample;
  auto* sample_cmd = app.add_subcommand("sample-frames", "Print frame indices from a sampling policy");
  sample_cmd->add_option("--frames", sample.frames, "Frame count")->required();
  sample_cmd->add_option("--mode", sample.mode, "uniform or train")
      ->check(CLI::IsMember({"uniform", "train"}))->capture_default_str();
  sample_cmd->add_option("--n", sample.n, "Uniform sample size")->capture_default_str();
  sample_cmd->add_option("--draws", sample.draws, "Training draws")->capture_default_str();
  sample_cmd->add_option("--seed", sample.seed, "Random seed")->capture_default_str();

  try {
    app.parse(std::vector<std::string>(args.rbegin(), args.rend()));
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (*build_cmd) return RunBuildDataset(build, out);
    if (*eval_cmd) return RunEvaluate(eval, out);
    if (*track_cmd) return RunTrack(track, out);
    if (*sel_cmd) return RunCheckSelector(sel, out);
    if (*sched_cmd) return RunSchedule(sched_frames, sched_clip, sched_unsplit, out);
    if (*sample_cmd) return RunSampleFrames(sample, out);
  } catch (const std::exception& e) {
    err << "trackkit: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

int Main(int argc, char** argv) {
  std::vector<std::string> args(argv + 1, argv + argc);
  return Dispatch(args, std::cout, std::cerr);
}

}  // namespace trackkit::cli

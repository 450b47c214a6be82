// Copyright 2026 The evptrack Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

// evptrack command-line entry point.

#include <chrono>
#include <cstdio>
#include <exception>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "evptrack/ablation.hpp"
#include "evptrack/checkpoint.hpp"
#include "evptrack/config.hpp"
#include "evptrack/errors.hpp"
#include "evptrack/grad_suite.hpp"
#include "evptrack/metrics.hpp"
#include "evptrack/model.hpp"
#include "evptrack/results_io.hpp"
#include "evptrack/synth.hpp"
#include "evptrack/tracker.hpp"
#include "evptrack/train.hpp"

namespace fs = std::filesystem;

namespace {

evp::RunConfig config_or_default(const std::string& path) {
  return path.empty() ? evp::RunConfig{} : evp::load_config(path);
}

int cmd_synth(const std::string& config, const std::string& out) {
  const evp::RunConfig cfg = config_or_default(config);
  const auto videos = evp::synth_dataset(cfg.data);
  evp::write_dataset(out, videos);
  std::printf("wrote %zu videos to %s\n", videos.size(), out.c_str());
  return 0;
}

int cmd_train(const std::string& config, const std::string& data, const std::string& out,
              const std::string& trace) {
  const evp::RunConfig cfg = config_or_default(config);
  const auto videos = data.empty() ? evp::synth_dataset(cfg.data) : evp::read_dataset(data);
  const fs::path ckpt_path(out);
  evp::TrainHooks hooks;
  hooks.on_step = [&](std::size_t step, const evp::StepStats& s) {
    if (step % 10 == 0 || step + 1 == cfg.train.steps) {
      std::printf("step %5zu  loss %.5f  cls %.5f  l1 %.5f  giou %.5f  |g| %.3f\n", step, s.loss, s.cls, s.l1,
                  s.giou, s.grad_norm);
      std::fflush(stdout);
    }
  };
  hooks.on_checkpoint = [&](std::size_t step, const evp::ModelParams<float>& params) {
    const evp::Checkpoint ck = evp::save_model(params);
    if (step == cfg.train.steps) {
      evp::write_checkpoint(ckpt_path, ck);
    } else {
      fs::path p = ckpt_path;
      p.replace_filename(ckpt_path.stem().string() + ".step" + std::to_string(step) + ckpt_path.extension().string());
      evp::write_checkpoint(p, ck);
    }
  };
  const auto t0 = std::chrono::steady_clock::now();
  const evp::TrainResult result = evp::train_loop(cfg, videos, hooks);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  if (cfg.train.steps == 0) evp::write_checkpoint(ckpt_path, evp::save_model(result.params));
  const fs::path trace_path = trace.empty() ? fs::path(out + ".loss.csv") : fs::path(trace);
  evp::write_loss_trace(trace_path, result.loss_trace);
  std::printf("trained %zu steps in %.1f s; checkpoint %s, loss trace %s\n", cfg.train.steps, secs, out.c_str(),
              trace_path.c_str());
  return 0;
}

int cmd_track(const std::string& ckpt, const std::string& video_dir, const std::string& out,
              const std::string& config) {
  const auto params = evp::load_model<float>(evp::read_checkpoint(ckpt));
  const evp::TrackerConfig tracker = config_or_default(config).tracker;
  const evp::VideoSequence video = evp::read_video(video_dir);
  const auto boxes = evp::track_video<float>(params, tracker, video.frames, video.boxes.front());
  evp::write_boxes(out, boxes);
  std::printf("tracked %zu frames, mean IoU %.4f\n", boxes.size(), evp::mean_iou(boxes, video.boxes));
  return 0;
}

int cmd_eval(const std::string& results, const std::string& gt, const std::string& report) {
  std::vector<evp::VideoMetrics> videos;
  for (const auto& entry : fs::directory_iterator(results)) {
    if (entry.path().extension() != ".txt") continue;
    const std::string name = entry.path().stem().string();
    fs::path gt_path = fs::path(gt) / name / "groundtruth.txt";
    if (!fs::exists(gt_path)) gt_path = fs::path(gt) / (name + ".txt");
    if (!fs::exists(gt_path)) throw evp::IoError("no ground truth for " + name + " under " + gt);
    videos.push_back(evp::evaluate_video(name, evp::read_boxes(entry.path()), evp::read_boxes(gt_path)));
  }
  if (videos.empty()) throw evp::IoError("no result files (*.txt) in " + results);
  const evp::EvalReport r = evp::make_report(std::move(videos));
  evp::write_text_file(report, r.to_json());
  std::cout << r.to_text();
  return 0;
}

int cmd_ablate(const std::string& config, const std::string& report) {
  const evp::RunConfig cfg = config_or_default(config);
  const evp::AblationReport r = evp::run_ablation(cfg, [](const std::string& line) {
    std::printf("%s\n", line.c_str());
    std::fflush(stdout);
  });
  if (!report.empty()) evp::write_text_file(report, r.to_json());
  std::cout << r.to_text();
  return 0;
}

int cmd_gradcheck() {
  const auto cases = evp::run_grad_suite();
  std::size_t failed = 0;
  for (const auto& c : cases) {
    std::printf("%-6s %-28s seed %llu  rel err %.3e  (tol %.0e)\n", c.passed() ? "ok" : "FAIL", c.name.c_str(),
                static_cast<unsigned long long>(c.seed), c.result.max_rel_error, c.tolerance);
    failed += !c.passed();
  }
  std::printf("%zu/%zu checks passed\n", cases.size() - failed, cases.size());
  return failed == 0 ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"evptrack: visual object tracker with explicit visual prompts"};
  app.require_subcommand(1);

  std::string config, out, data, trace, ckpt, video, results, gt, report;

  auto* synth = app.add_subcommand("synth", "generate a synthetic video dataset");
  synth->add_option("--config", config, "JSON config (defaults when omitted)");
  synth->add_option("--out", out, "output directory")->required();

  auto* train = app.add_subcommand("train", "train a model");
  train->add_option("--config", config, "JSON config");
  train->add_option("--data", data, "dataset directory (synthesized from the config when omitted)");
  train->add_option("--out", out, "checkpoint path")->required();
  train->add_option("--trace", trace, "loss trace path (default: <out>.loss.csv)");

  auto* track = app.add_subcommand("track", "one-pass tracking of a video directory");
  track->add_option("--ckpt", ckpt, "checkpoint")->required();
  track->add_option("--video", video, "video directory with frames and groundtruth.txt")->required();
  track->add_option("--out", out, "result file")->required();
  track->add_option("--config", config, "JSON config for tracker settings");

  auto* eval = app.add_subcommand("eval", "score result files against ground truth");
  eval->add_option("--results", results, "directory of <video>.txt result files")->required();
  eval->add_option("--gt", gt, "dataset directory or directory of <video>.txt files")->required();
  eval->add_option("--report", report, "JSON report path")->required();

  auto* ablate = app.add_subcommand("ablate", "train and compare prompts=none vs prompts=both");
  ablate->add_option("--config", config, "JSON config");
  ablate->add_option("--report", report, "JSON report path");

  auto* gradcheck = app.add_subcommand("gradcheck", "run the float64 finite-difference suite");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*synth) return cmd_synth(config, out);
    if (*train) return cmd_train(config, data, out, trace);
    if (*track) return cmd_track(ckpt, video, out, config);
    if (*eval) return cmd_eval(results, gt, report);
    if (*ablate) return cmd_ablate(config, report);
    if (*gradcheck) return cmd_gradcheck();
  } catch (const std::exception& e) {
    std::fprintf(stderr, "evptrack: error: %s\n", e.what());
    return 2;
  }
  return 1;
}

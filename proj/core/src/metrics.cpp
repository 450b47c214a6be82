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

#include "evptrack/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "json.hpp"

namespace evp {

namespace {

void check_lengths(const std::vector<BBox>& pred, const std::vector<BBox>& gt) {
  if (pred.size() != gt.size()) {
    throw std::invalid_argument("metrics: " + std::to_string(pred.size()) + " predictions vs " +
                                std::to_string(gt.size()) + " ground-truth boxes");
  }
  if (gt.empty()) throw std::invalid_argument("metrics: empty trajectory");
}

double threshold(std::size_t k, std::size_t count, double hi) {
  return hi * static_cast<double>(k) / static_cast<double>(count - 1);
}

double mean_of(const std::vector<double>& v) {
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

nlohmann::json metrics_json(const VideoMetrics& m) {
  return {{"name", m.name},
          {"frames", m.frames},
          {"auc", m.auc},
          {"precision", m.precision},
          {"norm_precision", m.norm_precision},
          {"mean_iou", m.mean_iou},
          {"success_curve", m.success_curve},
          {"norm_precision_curve", m.norm_precision_curve}};
}

}  // namespace

std::vector<double> frame_ious(const std::vector<BBox>& pred, const std::vector<BBox>& gt) {
  check_lengths(pred, gt);
  std::vector<double> out(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) out[i] = iou(pred[i], gt[i]);
  return out;
}

double mean_iou(const std::vector<BBox>& pred, const std::vector<BBox>& gt) { return mean_of(frame_ious(pred, gt)); }

std::vector<double> success_curve(const std::vector<BBox>& pred, const std::vector<BBox>& gt) {
  const auto ious = frame_ious(pred, gt);
  std::vector<double> curve(kSuccessThresholds);
  for (std::size_t k = 0; k < kSuccessThresholds; ++k) {
    const double t = threshold(k, kSuccessThresholds, 1.0);
    const auto hits = std::count_if(ious.begin(), ious.end(), [t](double v) { return v >= t; });
    curve[k] = static_cast<double>(hits) / static_cast<double>(ious.size());
  }
  return curve;
}

double success_auc(const std::vector<BBox>& pred, const std::vector<BBox>& gt) {
  return mean_of(success_curve(pred, gt));
}

double precision(const std::vector<BBox>& pred, const std::vector<BBox>& gt, double radius) {
  check_lengths(pred, gt);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gt.size(); ++i) {
    const double d = std::hypot(pred[i].cx() - gt[i].cx(), pred[i].cy() - gt[i].cy());
    hits += d <= radius;
  }
  return static_cast<double>(hits) / static_cast<double>(gt.size());
}

std::vector<double> norm_precision_curve(const std::vector<BBox>& pred, const std::vector<BBox>& gt) {
  check_lengths(pred, gt);
  std::vector<double> dist(gt.size());
  for (std::size_t i = 0; i < gt.size(); ++i) {
    if (!is_valid(gt[i])) throw std::invalid_argument("norm_precision: zero-size ground-truth box");
    dist[i] = std::hypot((pred[i].cx() - gt[i].cx()) / gt[i].w, (pred[i].cy() - gt[i].cy()) / gt[i].h);
  }
  std::vector<double> curve(kNormPrecisionThresholds);
  for (std::size_t k = 0; k < kNormPrecisionThresholds; ++k) {
    const double t = threshold(k, kNormPrecisionThresholds, 0.5);
    const auto hits = std::count_if(dist.begin(), dist.end(), [t](double v) { return v <= t; });
    curve[k] = static_cast<double>(hits) / static_cast<double>(dist.size());
  }
  return curve;
}

double norm_precision(const std::vector<BBox>& pred, const std::vector<BBox>& gt) {
  return mean_of(norm_precision_curve(pred, gt));
}

VideoMetrics evaluate_video(const std::string& name, const std::vector<BBox>& pred, const std::vector<BBox>& gt) {
  VideoMetrics m;
  m.name = name;
  m.frames = gt.size();
  m.success_curve = success_curve(pred, gt);
  m.auc = mean_of(m.success_curve);
  m.precision = precision(pred, gt);
  m.norm_precision_curve = norm_precision_curve(pred, gt);
  m.norm_precision = mean_of(m.norm_precision_curve);
  m.mean_iou = mean_iou(pred, gt);
  return m;
}

EvalReport make_report(std::vector<VideoMetrics> videos) {
  if (videos.empty()) throw std::invalid_argument("make_report: no videos");
  std::sort(videos.begin(), videos.end(), [](const auto& a, const auto& b) { return a.name < b.name; });
  EvalReport r;
  VideoMetrics& agg = r.aggregate;
  agg.name = "mean";
  agg.success_curve.assign(kSuccessThresholds, 0.0);
  agg.norm_precision_curve.assign(kNormPrecisionThresholds, 0.0);
  const double n = static_cast<double>(videos.size());
  for (const auto& v : videos) {
    agg.frames += v.frames;
    agg.auc += v.auc / n;
    agg.precision += v.precision / n;
    agg.norm_precision += v.norm_precision / n;
    agg.mean_iou += v.mean_iou / n;
    for (std::size_t k = 0; k < kSuccessThresholds; ++k) agg.success_curve[k] += v.success_curve[k] / n;
    for (std::size_t k = 0; k < kNormPrecisionThresholds; ++k)
      agg.norm_precision_curve[k] += v.norm_precision_curve[k] / n;
  }
  r.videos = std::move(videos);
  return r;
}

std::string EvalReport::to_json() const {
  nlohmann::json j;
  j["aggregate"] = metrics_json(aggregate);
  j["videos"] = nlohmann::json::array();
  for (const auto& v : videos) j["videos"].push_back(metrics_json(v));
  return j.dump(2) + "\n";
}

std::string EvalReport::to_text() const {
  std::string out;
  char line[160];
  std::snprintf(line, sizeof line, "%-24s %7s %7s %7s %7s %7s\n", "video", "frames", "AUC", "P", "P_norm", "mIoU");
  out += line;
  auto row = [&](const VideoMetrics& m) {
    std::snprintf(line, sizeof line, "%-24s %7zu %7.4f %7.4f %7.4f %7.4f\n", m.name.c_str(), m.frames, m.auc,
                  m.precision, m.norm_precision, m.mean_iou);
    out += line;
  };
  for (const auto& v : videos) row(v);
  row(aggregate);
  return out;
}

}  // namespace evp

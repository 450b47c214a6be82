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

#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "evptrack/bbox.hpp"

namespace evp {

inline constexpr std::size_t kSuccessThresholds = 21;        // IoU 0, 0.05, ..., 1
inline constexpr std::size_t kNormPrecisionThresholds = 51;  // 0, 0.01, ..., 0.5
inline constexpr double kPrecisionRadius = 20.0;             // pixels

/// Per-frame IoU; a zero-area prediction scores 0.
std::vector<double> frame_ious(const std::vector<BBox>& pred, const std::vector<BBox>& gt);
double mean_iou(const std::vector<BBox>& pred, const std::vector<BBox>& gt);

/// success(t) = fraction of frames with IoU >= t.
std::vector<double> success_curve(const std::vector<BBox>& pred, const std::vector<BBox>& gt);
double success_auc(const std::vector<BBox>& pred, const std::vector<BBox>& gt);

/// Fraction of frames whose center distance is <= radius pixels.
double precision(const std::vector<BBox>& pred, const std::vector<BBox>& gt, double radius = kPrecisionRadius);

/// Center offsets divided by the ground-truth width and height per axis; the
/// curve holds the fraction of frames within each threshold.
std::vector<double> norm_precision_curve(const std::vector<BBox>& pred, const std::vector<BBox>& gt);
double norm_precision(const std::vector<BBox>& pred, const std::vector<BBox>& gt);

struct VideoMetrics {
  std::string name;
  std::size_t frames = 0;
  double auc = 0.0;
  double precision = 0.0;
  double norm_precision = 0.0;
  double mean_iou = 0.0;
  std::vector<double> success_curve;
  std::vector<double> norm_precision_curve;
};

VideoMetrics evaluate_video(const std::string& name, const std::vector<BBox>& pred, const std::vector<BBox>& gt);

struct EvalReport {
  std::vector<VideoMetrics> videos;  // sorted by name
  VideoMetrics aggregate;            // unweighted mean over videos

  std::string to_json() const;
  std::string to_text() const;
};

/// Sorts by name and averages.
EvalReport make_report(std::vector<VideoMetrics> videos);

}  // namespace evp

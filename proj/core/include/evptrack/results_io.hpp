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

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "evptrack/bbox.hpp"

namespace evp {

/// Box files hold one "x,y,w,h" line per frame in absolute pixels. Values are
/// written with enough digits to round-trip a double exactly.
std::string format_boxes(const std::vector<BBox>& boxes);
std::vector<BBox> parse_boxes(std::string_view text);

void write_boxes(const std::filesystem::path& path, const std::vector<BBox>& boxes);
std::vector<BBox> read_boxes(const std::filesystem::path& path);

/// Loss trace: one "step,loss" line per optimizer step.
void write_loss_trace(const std::filesystem::path& path, const std::vector<double>& losses);
std::vector<double> read_loss_trace(const std::filesystem::path& path);

std::string read_text_file(const std::filesystem::path& path);
void write_text_file(const std::filesystem::path& path, std::string_view text);

}  // namespace evp

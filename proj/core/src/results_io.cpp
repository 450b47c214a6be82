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

#include "evptrack/results_io.hpp"

#include <charconv>
#include <fstream>
#include <limits>
#include <sstream>

#include "evptrack/errors.hpp"

namespace evp {

namespace {

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

std::vector<std::string_view> split_lines(std::string_view text) {
  std::vector<std::string_view> lines;
  while (!text.empty()) {
    const auto nl = text.find('\n');
    lines.push_back(text.substr(0, nl));
    if (nl == std::string_view::npos) break;
    text.remove_prefix(nl + 1);
  }
  return lines;
}

double parse_number(std::string_view field, std::size_t line) {
  field = trim(field);
  double value = 0.0;
  const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), value);
  if (ec != std::errc() || ptr != field.data() + field.size()) {
    throw FormatError("line " + std::to_string(line) + ": bad number '" + std::string(field) + "'");
  }
  return value;
}

std::vector<double> parse_fields(std::string_view row, std::size_t expected, std::size_t line) {
  std::vector<double> out;
  while (true) {
    const auto comma = row.find(',');
    out.push_back(parse_number(row.substr(0, comma), line));
    if (comma == std::string_view::npos) break;
    row.remove_prefix(comma + 1);
  }
  if (out.size() != expected) {
    throw FormatError("line " + std::to_string(line) + ": expected " + std::to_string(expected) + " fields, got " +
                      std::to_string(out.size()));
  }
  return out;
}

std::ostringstream exact_stream() {
  std::ostringstream os;
  os.precision(std::numeric_limits<double>::max_digits10);
  return os;
}

}  // namespace

std::string format_boxes(const std::vector<BBox>& boxes) {
  auto os = exact_stream();
  for (const auto& b : boxes) os << b.x << ',' << b.y << ',' << b.w << ',' << b.h << '\n';
  return os.str();
}

std::vector<BBox> parse_boxes(std::string_view text) {
  std::vector<BBox> boxes;
  std::size_t n = 0;
  for (auto line : split_lines(text)) {
    ++n;
    line = trim(line);
    if (line.empty()) continue;
    const auto f = parse_fields(line, 4, n);
    boxes.push_back({f[0], f[1], f[2], f[3]});
  }
  return boxes;
}

std::string read_text_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text_file(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << text;
  if (!out) throw IoError("write failed: " + path.string());
}

void write_boxes(const std::filesystem::path& path, const std::vector<BBox>& boxes) {
  write_text_file(path, format_boxes(boxes));
}

std::vector<BBox> read_boxes(const std::filesystem::path& path) {
  try {
    return parse_boxes(read_text_file(path));
  } catch (const FormatError& e) {
    throw FormatError(path.string() + ": " + e.what());
  }
}

void write_loss_trace(const std::filesystem::path& path, const std::vector<double>& losses) {
  auto os = exact_stream();
  for (std::size_t i = 0; i < losses.size(); ++i) os << i << ',' << losses[i] << '\n';
  write_text_file(path, os.str());
}

std::vector<double> read_loss_trace(const std::filesystem::path& path) {
  std::vector<double> losses;
  std::size_t n = 0;
  for (auto line : split_lines(read_text_file(path))) {
    ++n;
    line = trim(line);
    if (line.empty()) continue;
    const auto f = parse_fields(line, 2, n);
    if (f[0] != static_cast<double>(losses.size())) throw FormatError("loss trace steps out of order at line " + std::to_string(n));
    losses.push_back(f[1]);
  }
  return losses;
}

}  // namespace evp

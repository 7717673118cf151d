/*
 * Copyright 2026 The Nightforge Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 *      http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#pragma once

#include <cstdio>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include "nightforge/error.hpp"
#include "nightforge/tone.hpp"

namespace nightforge {

enum class StageGroup { kPreliminary, kLowLight };

struct StageReport {
  std::string name;
  StageGroup group = StageGroup::kLowLight;
  double seconds = 0.0;
  bool skipped = false;
  std::optional<Histogram256> hist_before;  // luma of the stage input
  std::optional<Histogram256> hist_after;   // luma of the stage output
};

struct TimingRow {
  std::string name;
  StageGroup group = StageGroup::kLowLight;
  double mean_seconds = 0.0;
  double percent = 0.0;  // of the whole pipeline
};

struct TimingTable {
  std::vector<TimingRow> rows;
  double preliminary_seconds = 0.0;
  double low_light_seconds = 0.0;
  double total_seconds = 0.0;
  int runs = 0;

  double percent_of_total(double seconds) const { return total_seconds > 0 ? 100.0 * seconds / total_seconds : 0.0; }
  const TimingRow* find(const std::string& name) const {
    for (const auto& r : rows)
      if (r.name == name) return &r;
    return nullptr;
  }
};

/// Per-stage means over several runs of the same stage sequence.
inline TimingTable emit_timing_table(const std::vector<std::vector<StageReport>>& runs) {
  if (runs.empty() || runs.front().empty()) fail(Errc::kInvalidArgument, "timing table needs at least one run");
  TimingTable table;
  table.runs = static_cast<int>(runs.size());
  for (const auto& stage : runs.front()) table.rows.push_back({stage.name, stage.group, 0.0, 0.0});
  for (const auto& run : runs) {
    if (run.size() != table.rows.size()) fail(Errc::kInvalidArgument, "runs have different stage lists");
    for (std::size_t i = 0; i < run.size(); ++i) {
      if (run[i].name != table.rows[i].name) fail(Errc::kInvalidArgument, "runs have different stage order");
      table.rows[i].mean_seconds += run[i].seconds;
    }
  }
  for (auto& row : table.rows) {
    row.mean_seconds /= static_cast<double>(runs.size());
    (row.group == StageGroup::kPreliminary ? table.preliminary_seconds : table.low_light_seconds) += row.mean_seconds;
  }
  table.total_seconds = table.preliminary_seconds + table.low_light_seconds;
  for (auto& row : table.rows) row.percent = table.percent_of_total(row.mean_seconds);
  return table;
}

inline std::string format_timing_text(const TimingTable& t) {
  std::ostringstream out;
  char line[160];
  auto emit = [&](const char* name, double s) {
    std::snprintf(line, sizeof(line), "%-30s %10.4f %8.2f%%\n", name, s, t.percent_of_total(s));
    out << line;
  };
  std::snprintf(line, sizeof(line), "%-30s %10s %9s\n", "Operation", "Time (s)", "Share");
  out << line << "mean of " << t.runs << " run(s)\n";
  emit("Preliminary steps", t.preliminary_seconds);
  for (const auto& r : t.rows)
    if (r.group == StageGroup::kPreliminary) emit(("  " + r.name).c_str(), r.mean_seconds);
  emit("Low-light specific steps", t.low_light_seconds);
  for (const auto& r : t.rows)
    if (r.group == StageGroup::kLowLight) emit(("  " + r.name).c_str(), r.mean_seconds);
  emit("Entire pipeline", t.total_seconds);
  return out.str();
}

inline std::string format_timing_csv(const TimingTable& t) {
  std::ostringstream out;
  char line[160];
  out << "group,stage,mean_seconds,percent\n";
  for (const auto& r : t.rows) {
    std::snprintf(line, sizeof(line), "%s,%s,%.6f,%.2f\n",
                  r.group == StageGroup::kPreliminary ? "preliminary" : "low_light", r.name.c_str(), r.mean_seconds,
                  r.percent);
    out << line;
  }
  std::snprintf(line, sizeof(line), "total,preliminary,%.6f,%.2f\n", t.preliminary_seconds,
                t.percent_of_total(t.preliminary_seconds));
  out << line;
  std::snprintf(line, sizeof(line), "total,low_light,%.6f,%.2f\n", t.low_light_seconds,
                t.percent_of_total(t.low_light_seconds));
  out << line;
  std::snprintf(line, sizeof(line), "total,pipeline,%.6f,%.2f\n", t.total_seconds, t.total_seconds > 0 ? 100.0 : 0.0);
  out << line;
  return out.str();
}

namespace report_detail {

inline std::string svg_histogram(const Histogram256& h, const char* color) {
  std::uint64_t peak = 1;
  for (auto b : h.bins) peak = std::max(peak, b);
  std::ostringstream svg;
  svg << "<svg width=\"256\" height=\"100\" style=\"background:#111\">";
  for (int b = 0; b < 256; ++b) {
    const double height = 100.0 * static_cast<double>(h.bins[b]) / static_cast<double>(peak);
    svg << "<rect x=\"" << b << "\" y=\"" << 100.0 - height << "\" width=\"1\" height=\"" << height
        << "\" fill=\"" << color << "\"/>";
  }
  svg << "</svg>";
  return svg.str();
}

}  // namespace report_detail

/// Writes NN_<stage>.csv (bin,count of the stage output luma) for each stage
/// that captured histograms, plus summary.html. Returns the files written;
/// nothing is written when no stage carries a histogram.
inline std::vector<std::filesystem::path> emit_stage_histograms(const std::vector<StageReport>& reports,
                                                                const std::filesystem::path& dir) {
  std::vector<std::filesystem::path> written;
  const bool any = std::ranges::any_of(reports, [](const StageReport& r) { return r.hist_after.has_value(); });
  if (!any) return written;
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) fail(Errc::kIoError, "cannot create " + dir.string() + ": " + ec.message());

  std::ostringstream html;
  html << "<!doctype html><html><head><meta charset=\"utf-8\"><title>Stage histograms</title></head>"
       << "<body style=\"font-family:sans-serif\"><h1>Luma histograms per stage</h1><table>"
       << "<tr><th>#</th><th>stage</th><th>before</th><th>after</th></tr>";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    if (!r.hist_after) continue;
    char name[96];
    std::snprintf(name, sizeof(name), "%02zu_%s.csv", i, r.name.c_str());
    const auto path = dir / name;
    std::ofstream csv(path);
    if (!csv) fail(Errc::kIoError, "cannot write " + path.string());
    csv << "bin,count\n";
    for (int b = 0; b < 256; ++b) csv << b << ',' << r.hist_after->bins[b] << '\n';
    if (!csv) fail(Errc::kIoError, "failed writing " + path.string());
    written.push_back(path);
    html << "<tr><td>" << i << "</td><td>" << r.name << (r.skipped ? " (skipped)" : "") << "</td><td>"
         << (r.hist_before ? report_detail::svg_histogram(*r.hist_before, "#888") : "") << "</td><td>"
         << report_detail::svg_histogram(*r.hist_after, "#ddd") << "</td></tr>";
  }
  html << "</table></body></html>\n";
  const auto summary = dir / "summary.html";
  std::ofstream out(summary);
  if (!out) fail(Errc::kIoError, "cannot write " + summary.string());
  out << html.str();
  written.push_back(summary);
  return written;
}

}  // namespace nightforge

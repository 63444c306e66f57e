#pragma once

#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <nlohmann/json.hpp>

#include "hyface/core/error.hpp"
#include "hyface/core/format.hpp"
#include "hyface/erp/csv_io.hpp"
#include "hyface/svc/engine.hpp"
#include "hyface/svc/replay.hpp"

namespace hyface::svc {

// Session export, schema hyface.export/1. All tables are comma-separated,
// UTF-8, LF line endings, one header row.
//
//   onsets.csv             sequence,tick,time_s,monotonic_ms,wall_clock,label,condition
//   events.csv             time_s,label,condition (erp-lab events format)
//   choices.csv            sequence,shown,condition,participant_id,chosen,response_ms
//   confusion_counts.csv   shown,<eight emotions>  (integer counts)
//   confusion_percent.csv  shown,<eight emotions>  (row percentages, 6 decimals)
//   replay.jsonl           command/frame replay log (when a recorder ran)
//   manifest.json          schema, status (completed|aborted|empty), counts, file list
inline constexpr std::string_view kExportSchema = "hyface.export/1";

inline std::string format_onsets(const std::vector<OnsetLogEntry>& onsets) {
  std::string out = "sequence,tick,time_s,monotonic_ms,wall_clock,label,condition\n";
  for (const auto& o : onsets)
    out += std::to_string(o.sequence) + "," + std::to_string(o.tick) + "," + fixed(o.monotonic_ms / 1000.0, 6) + "," +
           fixed(o.monotonic_ms, 3) + "," + o.wall_clock + "," + std::string(to_string(o.label)) + "," +
           std::string(to_string(o.condition)) + "\n";
  return out;
}

inline erp::EventList onsets_to_events(const std::vector<OnsetLogEntry>& onsets) {
  erp::EventList events;
  for (const auto& o : onsets)
    events.push_back({o.monotonic_ms / 1000.0, std::string(to_string(o.label)), std::string(to_string(o.condition))});
  return events;
}

inline std::string format_choices(const std::vector<ChoiceRecord>& choices) {
  std::string out = "sequence,shown,condition,participant_id,chosen,response_ms\n";
  for (const auto& c : choices)
    out += std::to_string(c.sequence) + "," + std::string(to_string(c.shown)) + "," + std::string(to_string(c.condition)) +
           "," + c.participant_id + "," + std::string(to_string(c.chosen)) + "," + fixed(c.response_ms, 3) + "\n";
  return out;
}

inline std::string confusion_header() {
  std::string h = "shown";
  for (auto e : kBasisEmotions) h += "," + std::string(to_string(e));
  return h + "\n";
}

inline std::string format_confusion_counts(const ConfusionMatrix& m) {
  std::string out = confusion_header();
  for (std::size_t i = 0; i < kBasisCount; ++i) {
    out += std::string(to_string(kBasisEmotions[i]));
    for (auto c : m.counts[i]) out += "," + std::to_string(c);
    out += "\n";
  }
  return out;
}

inline std::string format_confusion_percent(const ConfusionMatrix& m) {
  std::string out = confusion_header();
  for (std::size_t i = 0; i < kBasisCount; ++i) {
    out += std::string(to_string(kBasisEmotions[i]));
    for (double v : m.row_percent(i)) out += "," + fixed(v, 6);
    out += "\n";
  }
  return out;
}

/// Reads a confusion table (counts or percentages) back as doubles.
inline std::array<std::array<double, kBasisCount>, kBasisCount> parse_confusion_table(const std::string& text) {
  std::array<std::array<double, kBasisCount>, kBasisCount> t{};
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0, filled = 0;
  while (std::getline(in, line)) {
    ++row;
    if (line.empty()) continue;
    const auto cells = erp::csv::split(line);
    if (row == 1) {
      if (line + "\n" != confusion_header()) throw LoadError("confusion table: unexpected header");
      continue;
    }
    if (cells.size() != kBasisCount + 1) throw LoadError("confusion table row " + std::to_string(row) + ": expected 9 cells");
    const auto e = parse_emotion(cells[0]);
    if (!e || !is_basis(*e)) throw LoadError("confusion table row " + std::to_string(row) + ": unknown emotion");
    for (std::size_t j = 0; j < kBasisCount; ++j) t[basis_index(*e)][j] = erp::csv::parse_double(cells[j + 1], row, j + 1);
    ++filled;
  }
  if (filled != kBasisCount) throw LoadError("confusion table: expected 8 rows");
  return t;
}

namespace detail {

inline void write_file(const std::filesystem::path& p, const std::string& text) {
  std::ofstream f(p, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot open " + p.string() + " for writing");
  f.write(text.data(), static_cast<std::streamsize>(text.size()));
  f.close();
  if (!f) throw IoError("write failed for " + p.string());
}

}  // namespace detail

/// Writes a completed, aborted or never-started session into `out_dir`.
/// Files are staged in a sibling directory and moved into place with one
/// rename, so a failure leaves no partial export behind. `out_dir` must not
/// exist or be an empty directory.
inline std::vector<std::string> export_session(const std::optional<SessionRecord>& session, const std::string& out_dir,
                                               const std::optional<ReplayLog>& replay = std::nullopt) {
  namespace fs = std::filesystem;
  const fs::path out = fs::path(out_dir).lexically_normal();
  if (out.empty() || out.filename().empty()) throw IoError("export: invalid destination '" + out_dir + "'");
  std::error_code ec;
  if (fs::exists(out, ec)) {
    if (!fs::is_directory(out, ec) || !fs::is_empty(out, ec))
      throw IoError("export: destination " + out.string() + " exists and is not an empty directory");
  }
  const fs::path parent = out.has_parent_path() ? out.parent_path() : fs::path(".");
  if (!fs::is_directory(parent, ec)) throw IoError("export: parent directory " + parent.string() + " does not exist");

  const fs::path staging = parent / ("." + out.filename().string() + ".staging");
  fs::remove_all(staging, ec);
  if (!fs::create_directory(staging, ec)) throw IoError("export: cannot create " + staging.string() + ": " + ec.message());

  std::vector<std::string> files;
  try {
    const std::vector<OnsetLogEntry> no_onsets;
    const std::vector<ChoiceRecord> no_choices;
    const ConfusionMatrix empty_matrix;
    const auto& onsets = session ? session->onsets : no_onsets;
    const auto& choices = session ? session->choices : no_choices;
    const auto& matrix = session ? session->matrix : empty_matrix;

    const auto put = [&](const std::string& name, const std::string& text) {
      detail::write_file(staging / name, text);
      files.push_back(name);
    };
    put("onsets.csv", format_onsets(onsets));
    put("events.csv", erp::format_events(onsets_to_events(onsets)));
    put("choices.csv", format_choices(choices));
    put("confusion_counts.csv", format_confusion_counts(matrix));
    put("confusion_percent.csv", format_confusion_percent(matrix));
    if (replay) put("replay.jsonl", format_replay_log(*replay));

    nlohmann::json manifest{{"schema", kExportSchema},
                            {"status", session ? std::string(to_string(session->status)) : "empty"},
                            {"trials_scheduled", session ? session->schedule.size() : 0},
                            {"stimuli_presented", onsets.size()},
                            {"choices", choices.size()},
                            {"files", files}};
    if (session) manifest["config"] = to_json(session->config);
    detail::write_file(staging / "manifest.json", manifest.dump(2) + "\n");
    files.push_back("manifest.json");

    if (fs::exists(out, ec)) fs::remove(out, ec);  // empty directory, checked above
    fs::rename(staging, out, ec);
    if (ec) throw IoError("export: cannot move export into " + out.string() + ": " + ec.message());
  } catch (...) {
    fs::remove_all(staging, ec);
    throw;
  }
  return files;
}

}  // namespace hyface::svc

#pragma once

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <string_view>
#include <vector>

#include "hyface/core/error.hpp"
#include "hyface/core/format.hpp"
#include "hyface/erp/recording.hpp"

namespace hyface::erp {

// Comma-separated text, header row, LF line endings. Recording files:
//   # sample_rate=256            (optional; otherwise inferred from time_s)
//   # start_wall_clock=...       (optional)
//   time_s,Fp1,Fp2,...
//   0.000000000,1.234000,...
// Events files:
//   time_s,label,condition

namespace csv {

inline std::vector<std::string> split(std::string_view line) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = line.find(',', start);
    out.emplace_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
    if (pos == std::string_view::npos) break;
    start = pos + 1;
  }
  for (auto& s : out) {
    while (!s.empty() && (s.back() == '\r' || s.back() == ' ')) s.pop_back();
    while (!s.empty() && s.front() == ' ') s.erase(0, 1);
  }
  return out;
}

inline double parse_double(const std::string& s, std::size_t row, std::size_t col) {
  double v = 0.0;
  const auto* end = s.data() + s.size();
  const auto [ptr, ec] = std::from_chars(s.data(), end, v);
  if (ec != std::errc() || ptr != end || !std::isfinite(v))
    throw LoadError("row " + std::to_string(row) + ", column " + std::to_string(col) + ": '" + s +
                    "' is not a finite number");
  return v;
}

inline std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw LoadError("cannot open '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline void write_all(const std::string& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write '" + path + "'");
  out << text;
  if (!out) throw IoError("write failed for '" + path + "'");
}

}  // namespace csv

inline Recording parse_recording(const std::string& text) {
  Recording rec;
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  std::optional<double> declared_rate;
  bool header_seen = false;
  std::vector<double> times;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    if (line[0] == '#') {
      const auto body = line.substr(1);
      const auto eq = body.find('=');
      if (eq == std::string::npos) continue;
      auto key = csv::split(body.substr(0, eq)).front();
      const auto value = body.substr(eq + 1);
      if (key == "sample_rate") declared_rate = csv::parse_double(csv::split(value).front(), row, 1);
      if (key == "start_wall_clock") rec.start_wall_clock = value;
      continue;
    }
    const auto cells = csv::split(line);
    if (!header_seen) {
      if (cells.empty() || cells[0] != "time_s") throw LoadError("row " + std::to_string(row) + ": header must start with time_s");
      rec.channels.assign(cells.begin() + 1, cells.end());
      if (rec.channels.empty()) throw LoadError("row " + std::to_string(row) + ": no channels in header");
      rec.samples.assign(rec.channels.size(), {});
      header_seen = true;
      continue;
    }
    if (cells.size() != rec.channels.size() + 1)
      throw LoadError("row " + std::to_string(row) + ": expected " + std::to_string(rec.channels.size() + 1) +
                      " columns, found " + std::to_string(cells.size()));
    times.push_back(csv::parse_double(cells[0], row, 1));
    for (std::size_t c = 0; c < rec.channels.size(); ++c)
      rec.samples[c].push_back(csv::parse_double(cells[c + 1], row, c + 2));
  }
  if (!header_seen) throw LoadError("recording: missing header row");

  if (declared_rate) {
    rec.sample_rate = *declared_rate;
  } else {
    if (times.size() < 2) throw LoadError("recording: sample_rate comment required for fewer than 2 samples");
    const double span = times.back() - times.front();
    if (!(span > 0)) throw LoadError("recording: time_s column is not increasing");
    rec.sample_rate = std::round(static_cast<double>(times.size() - 1) / span * 1e6) / 1e6;
  }
  const double dt = 1.0 / rec.sample_rate;
  for (std::size_t i = 0; i < times.size(); ++i)
    if (std::abs(times[i] - times.front() - static_cast<double>(i) * dt) > 0.25 * dt)
      throw LoadError("recording: row " + std::to_string(i + 1) + " time_s breaks uniform sampling");
  try {
    validate(rec);
  } catch (const ValidationError& e) {
    throw LoadError(e.what());
  }
  return rec;
}

inline Recording load_recording(const std::string& path) { return parse_recording(csv::read_all(path)); }

inline std::string format_recording(const Recording& rec) {
  std::string out = "# sample_rate=" + fixed(rec.sample_rate, 6) + "\n";
  if (!rec.start_wall_clock.empty()) out += "# start_wall_clock=" + rec.start_wall_clock + "\n";
  out += "time_s";
  for (const auto& c : rec.channels) out += "," + c;
  out += "\n";
  for (std::size_t i = 0; i < rec.length(); ++i) {
    out += fixed(static_cast<double>(i) / rec.sample_rate, 9);
    for (const auto& ch : rec.samples) out += "," + fixed(ch[i], 6);
    out += "\n";
  }
  return out;
}

inline void save_recording(const std::string& path, const Recording& rec) {
  csv::write_all(path, format_recording(rec));
}

/// Parses an events table. When `duration_s` is given, events past the end of
/// the recording are rejected.
inline EventList parse_events(const std::string& text, std::optional<double> duration_s = std::nullopt) {
  EventList events;
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  bool header_seen = false;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto cells = csv::split(line);
    if (!header_seen) {
      if (cells.size() < 2 || cells[0] != "time_s" || cells[1] != "label")
        throw LoadError("row " + std::to_string(row) + ": events header must be time_s,label,condition");
      header_seen = true;
      continue;
    }
    if (cells.size() < 2 || cells.size() > 3)
      throw LoadError("row " + std::to_string(row) + ": expected time_s,label,condition");
    Event e;
    e.time_s = csv::parse_double(cells[0], row, 1);
    e.label = cells[1];
    if (cells.size() == 3) e.condition = cells[2];
    if (e.label.empty()) throw LoadError("row " + std::to_string(row) + ", column 2: empty label");
    if (e.time_s < 0.0) throw LoadError("row " + std::to_string(row) + ", column 1: negative time");
    if (duration_s && e.time_s > *duration_s)
      throw LoadError("row " + std::to_string(row) + ", column 1: event at " + std::to_string(e.time_s) +
                      " s is beyond the recording end (" + std::to_string(*duration_s) + " s)");
    if (!events.empty() && e.time_s < events.back().time_s)
      throw LoadError("row " + std::to_string(row) + ", column 1: events must be non-decreasing in time");
    events.push_back(std::move(e));
  }
  if (!header_seen) throw LoadError("events: missing header row");
  return events;
}

inline EventList load_events(const std::string& path, std::optional<double> duration_s = std::nullopt) {
  return parse_events(csv::read_all(path), duration_s);
}

inline std::string format_events(const EventList& events) {
  std::string out = "time_s,label,condition\n";
  for (const auto& e : events) out += fixed(e.time_s, 6) + "," + e.label + "," + e.condition + "\n";
  return out;
}

inline void save_events(const std::string& path, const EventList& events) {
  csv::write_all(path, format_events(events));
}

}  // namespace hyface::erp

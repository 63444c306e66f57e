#pragma once

#include <sstream>
#include <string>
#include <vector>

#include "hyface/core/error.hpp"
#include "hyface/erp/csv_io.hpp"
#include "hyface/erp/recording.hpp"

namespace hyface::erp {

/// Reads a stimulus-onset log as written by the control service
/// (columns located by name: time_s, label, condition; others ignored) and
/// returns it as an event list ready for epoching.
inline EventList parse_onset_log(const std::string& text) {
  EventList events;
  std::istringstream in(text);
  std::string line;
  std::size_t row = 0;
  std::vector<std::string> header;
  std::size_t c_time = 0, c_label = 0, c_cond = 0;
  while (std::getline(in, line)) {
    ++row;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto cells = csv::split(line);
    if (header.empty()) {
      header = cells;
      const auto find = [&](const char* name) {
        for (std::size_t i = 0; i < header.size(); ++i)
          if (header[i] == name) return i;
        throw LoadError(std::string("onset log: header lacks a '") + name + "' column");
      };
      c_time = find("time_s");
      c_label = find("label");
      c_cond = find("condition");
      continue;
    }
    if (cells.size() != header.size())
      throw LoadError("onset log row " + std::to_string(row) + ": expected " + std::to_string(header.size()) + " cells");
    Event e;
    e.time_s = csv::parse_double(cells[c_time], row, c_time + 1);
    e.label = cells[c_label];
    e.condition = cells[c_cond];
    if (!events.empty() && !(e.time_s > events.back().time_s))
      throw LoadError("onset log row " + std::to_string(row) + ": onsets must strictly increase");
    events.push_back(std::move(e));
  }
  if (header.empty()) throw LoadError("onset log: missing header row");
  return events;
}

inline EventList load_onset_log(const std::string& path) { return parse_onset_log(csv::read_all(path)); }

}  // namespace hyface::erp

#include "gesturegen/scheduler.hpp"

#include <algorithm>
#include <istream>
#include <optional>
#include <ostream>

#include "gesturegen/errors.hpp"
#include "json.hpp"

namespace gesturegen {

WordTiming synthetic_timings(const Utterance& utt, double seconds_per_word) {
  if (seconds_per_word <= 0.0) {
    throw SchedulingError("seconds_per_word must be positive");
  }
  WordTiming timings;
  if (utt.tokens.empty()) return timings;
  for (int k = 0; k <= utt.token_count(); ++k) {
    timings["T" + std::to_string(k)] = k * seconds_per_word;
  }
  return timings;
}

WordTiming load_timing_file(std::istream& in) {
  nlohmann::json doc = nlohmann::json::parse(in, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ParseError("timing file must be a JSON object of mark -> seconds");
  }
  WordTiming timings;
  for (const auto& [mark, value] : doc.items()) {
    if (!value.is_number()) {
      throw ParseError("timing for mark '" + mark + "' is not a number");
    }
    double t = value.get<double>();
    if (t < 0.0) throw ParseError("timing for mark '" + mark + "' is negative");
    timings[mark] = t;
  }
  // Mark order equals index order, so times must increase with the index.
  double prev = -1.0;
  int prev_idx = -1;
  std::vector<std::pair<int, double>> by_index;
  for (const auto& [mark, t] : timings) {
    by_index.emplace_back(stroke_index(mark), t);
  }
  std::sort(by_index.begin(), by_index.end());
  for (const auto& [idx, t] : by_index) {
    if (prev_idx >= 0 && t <= prev) {
      throw ParseError("timings not strictly increasing at mark T" +
                       std::to_string(idx));
    }
    prev = t;
    prev_idx = idx;
  }
  return timings;
}

Timeline resolve_schedule(const BmlDocument& doc, const WordTiming& timings,
                          double prep_lead, double min_duration) {
  if (prep_lead < 0.0) throw SchedulingError("prep_lead must be non-negative");
  if (min_duration <= 0.0) throw SchedulingError("min_duration must be positive");
  std::vector<ScheduleEntry> entries;
  entries.reserve(doc.gestures.size());
  for (const GestureBehavior& g : doc.gestures) {
    auto it = timings.find(g.stroke_start);
    if (it == timings.end()) {
      throw SchedulingError("no timing for mark '" + g.stroke_start + "'");
    }
    ScheduleEntry e;
    e.behavior = g;
    e.stroke_time = it->second;
    e.start_time = std::max(0.0, e.stroke_time - prep_lead);
    entries.push_back(e);
  }
  std::stable_sort(entries.begin(), entries.end(),
                   [](const ScheduleEntry& a, const ScheduleEntry& b) {
                     return a.stroke_time < b.stroke_time;
                   });
  for (size_t i = 0; i < entries.size(); ++i) {
    double end = entries[i].stroke_time + min_duration;
    if (i + 1 < entries.size()) {
      end = std::max(end, entries[i + 1].start_time);
    }
    entries[i].end_time = end;
  }
  return resolve_conflicts(std::move(entries));
}

Timeline resolve_conflicts(std::vector<ScheduleEntry> entries) {
  Timeline timeline;
  std::optional<ScheduleEntry> incumbent;
  for (ScheduleEntry& e : entries) {
    if (!incumbent) {
      incumbent = std::move(e);
      continue;
    }
    if (!incumbent->overlaps(e)) {
      timeline.entries.push_back(std::move(*incumbent));
      incumbent = std::move(e);
      continue;
    }
    if (e.behavior.priority < incumbent->behavior.priority) {
      timeline.dropped.push_back({std::move(incumbent->behavior), "overlap"});
      incumbent = std::move(e);
    } else {
      timeline.dropped.push_back({std::move(e.behavior), "overlap"});
    }
  }
  if (incumbent) timeline.entries.push_back(std::move(*incumbent));
  std::stable_sort(timeline.entries.begin(), timeline.entries.end(),
                   [](const ScheduleEntry& a, const ScheduleEntry& b) {
                     return a.start_time < b.start_time;
                   });
  return timeline;
}

void write_timeline_jsonl(const Timeline& timeline, std::ostream& out) {
  for (const ScheduleEntry& e : timeline.entries) {
    nlohmann::json rec = {{"lexeme", e.behavior.lexeme},
                          {"stroke_time", e.stroke_time},
                          {"start_time", e.start_time},
                          {"end_time", e.end_time},
                          {"dropped", false}};
    out << rec.dump() << '\n';
  }
  for (const DroppedEntry& d : timeline.dropped) {
    nlohmann::json rec = {{"lexeme", d.behavior.lexeme},
                          {"dropped", true},
                          {"reason", d.reason}};
    out << rec.dump() << '\n';
  }
}

}  // namespace gesturegen

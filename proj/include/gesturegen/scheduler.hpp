#pragma once

#include <iosfwd>
#include <map>
#include <string>
#include <vector>

#include "gesturegen/bml.hpp"
#include "gesturegen/textproc.hpp"

namespace gesturegen {

// Mark name -> absolute start time in seconds. Includes the trailing
// boundary mark, so the last word's duration is computable. A TTS engine's
// timing callback supplies this in production; synthetic_timings stands in
// for it offline.
using WordTiming = std::map<std::string, double>;

// Mark Tk at exactly k * seconds_per_word. Throws on a non-positive rate.
WordTiming synthetic_timings(const Utterance& utt, double seconds_per_word);

// {"T0": 0.0, "T1": 0.3, ...}
WordTiming load_timing_file(std::istream& in);

struct ScheduleEntry {
  GestureBehavior behavior;
  double stroke_time = 0.0;
  double start_time = 0.0;  // stroke_time minus preparation lead, floored at 0
  double end_time = 0.0;

  bool overlaps(const ScheduleEntry& other) const {
    return start_time < other.end_time && other.start_time < end_time;
  }
};

struct DroppedEntry {
  GestureBehavior behavior;
  std::string reason;
};

struct Timeline {
  std::vector<ScheduleEntry> entries;  // ordered by start_time, overlap-free
  std::vector<DroppedEntry> dropped;
};

// Assigns absolute times to every gesture: stroke_time from the timing
// map, start_time = max(0, stroke - prep_lead), end_time held until the
// next gesture's start but at least stroke + min_duration. Overlaps are
// then resolved by resolve_conflicts. Throws SchedulingError when a
// stroke mark has no timing.
Timeline resolve_schedule(const BmlDocument& doc, const WordTiming& timings,
                          double prep_lead = 0.25, double min_duration = 1.0);

// Greedy sweep over stroke-ordered entries: an entry that does not overlap
// the current survivor is kept; on overlap the lower priority number wins
// (ties keep the earlier entry) and the loser is dropped with reason
// "overlap". Deterministic.
Timeline resolve_conflicts(std::vector<ScheduleEntry> entries);

// JSON Lines: {"lexeme","stroke_time","start_time","end_time",
// "dropped":bool,"reason"?}
void write_timeline_jsonl(const Timeline& timeline, std::ostream& out);

}  // namespace gesturegen

#pragma once

#include <string>
#include <vector>

#include "gesturegen/lexicon.hpp"
#include "gesturegen/selector.hpp"
#include "gesturegen/textproc.hpp"

namespace gesturegen {

struct GestureBehavior {
  std::string stroke_start;  // mark name, "T<k>"
  std::string lexeme;
  std::string bml_type;
  std::string emotion;
  int priority = 0;  // 0 = highest; carries rheme ordering to the scheduler

  bool operator==(const GestureBehavior&) const = default;
};

struct BmlDocument {
  std::string utterance_id;
  std::string speech_fragment;  // marked-up text from insert_marks
  std::vector<GestureBehavior> gestures;  // ordered by stroke index

  bool operator==(const BmlDocument&) const = default;
};

// One behavior per proposal: stroke-start is the mark of the span's first
// word, lexeme/type/emotion come from the lexicon, priority is the
// proposal's position in the (prioritized) input order. Behaviors are
// sorted by stroke index, ties broken by priority.
BmlDocument build_bml(const Utterance& utt,
                      const std::vector<GestureProposal>& proposals,
                      const GestureLexicon& lexicon);

// Canonical UTF-8 serialization: XML declaration line, two-space indent,
// LF newlines, fixed attribute order (stroke-start, lexeme, type, emotion,
// then the id/priority extensions). Byte-deterministic.
std::string serialize(const BmlDocument& doc);

// Accepts the canonical dialect plus insignificant whitespace and
// attribute-order variation. Rejects behavior elements other than
// <gesture> and validates that every stroke-start mark exists in the
// speech fragment. Throws ParseError / ReferentialError.
BmlDocument parse(const std::string& xml);

int stroke_index(const std::string& mark_name);  // "T3" -> 3; throws ParseError

}  // namespace gesturegen

#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gesturegen/backend.hpp"
#include "gesturegen/lexicon.hpp"
#include "gesturegen/prompts.hpp"
#include "gesturegen/selector.hpp"
#include "gesturegen/textproc.hpp"

namespace gesturegen {

// Information-structure split of one utterance. The theme is optional:
// discourse-initial or elliptical utterances can be all rheme. The two
// spans never overlap, and together they need not cover every token.
struct RhemeTheme {
  std::optional<WordSpan> theme_span;
  WordSpan rheme_span;

  bool operator==(const RhemeTheme&) const = default;
};

struct CoverageCount {
  int within_rheme = 0;
  int outside_rheme = 0;
  std::map<GestureCategory, int> outside_by_category;
};

enum class OverlapRule {
  AnyToken,         // >= 1 shared token counts as within the rheme
  FullContainment,  // stricter variant for sensitivity analysis
};

// Asks the backend for theme and rheme phrases and resolves them locally.
// A missing or unresolvable theme leaves the theme empty and widens the
// rheme to the whole utterance. An unresolvable rheme phrase is retried
// once; a second failure throws DiscourseFailure.
RhemeTheme analyze_rheme_theme(const Utterance& utt, Backend& backend,
                               const PromptLibrary& prompts = PromptLibrary::builtin());

// Stable partition: proposals overlapping the rheme first (flagged
// rheme_aligned), original order preserved within each part.
std::vector<GestureProposal> prioritize(std::vector<GestureProposal> proposals,
                                        const RhemeTheme& rt);

// Counts annotated gestures inside/outside the recorded rheme spans,
// breaking the outside count down by gesture category. Throws
// ReferentialError when an annotation's utterance has no analysis.
CoverageCount rheme_coverage(const std::vector<AnnotationRecord>& annotations,
                             const std::map<std::string, RhemeTheme>& analyses,
                             OverlapRule rule = OverlapRule::AnyToken);

// Fixture file format, JSON Lines:
//   {"utterance_id":"...","theme":[s,e]|null,"rheme":[s,e]}
std::map<std::string, RhemeTheme> load_rheme_fixture(std::istream& in);
std::map<std::string, RhemeTheme> load_rheme_fixture_file(const std::string& path);

}  // namespace gesturegen

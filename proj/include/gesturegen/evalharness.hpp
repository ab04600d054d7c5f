#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "gesturegen/backend.hpp"
#include "gesturegen/lexicon.hpp"
#include "gesturegen/selector.hpp"
#include "gesturegen/textproc.hpp"

namespace gesturegen {

enum class AppropriatenessLabel { Appropriate, Inappropriate, NoCorrespondingGesture };

std::string_view to_string(AppropriatenessLabel label);
AppropriatenessLabel parse_appropriateness_label(std::string_view text);

enum class AlignmentKind { Both, ModelOnly, SpeakerOnly };

struct AlignmentOutcome {
  AlignmentKind kind = AlignmentKind::Both;
  std::string utterance_id;
  std::optional<WordSpan> model_span;    // present unless SpeakerOnly
  std::optional<WordSpan> speaker_span;  // present unless ModelOnly
};

struct AlignmentCounts {
  int both = 0;
  int model_only = 0;
  int speaker_only = 0;

  bool operator==(const AlignmentCounts&) const = default;
};

AlignmentCounts count_outcomes(const std::vector<AlignmentOutcome>& outcomes);

// Token gap between two spans: 0 when they overlap, otherwise the index
// distance from the end of the earlier span to the start of the later one.
int span_gap(const WordSpan& a, const WordSpan& b);

// One-to-one matching between model and speaker spans. A pair is eligible
// when its gap is at most `tolerance` tokens. The matching maximizes the
// number of matched pairs (so swapping roles cannot change the Both
// count), preferring nearer pairs when there is a choice. Deterministic.
std::vector<std::pair<int, int>> match_spans(const std::vector<WordSpan>& model,
                                             const std::vector<WordSpan>& speaker,
                                             int tolerance);

std::vector<AlignmentOutcome> align(const std::vector<GestureProposal>& proposals,
                                    const std::vector<AnnotationRecord>& annotations,
                                    int tolerance);

struct CategoryTally {
  int appropriate = 0;
  int inappropriate = 0;
  int no_corresponding = 0;

  bool operator==(const CategoryTally&) const = default;
};

struct Tallies {
  CategoryTally category1;  // ground truth available; all three labels
  CategoryTally category2;  // no ground truth; NoCorrespondingGesture invalid

  bool operator==(const Tallies&) const = default;
};

// Throws ValidationError for NoCorrespondingGesture under category 2 or a
// category outside {1,2}.
Tallies tally(const std::vector<std::pair<int, AppropriatenessLabel>>& labels);

struct LatencyStats {
  double min_seconds = 0.0;
  double max_seconds = 0.0;
  double mean_seconds = 0.0;
};

// Exact min/max, mean at full precision. Throws ValidationError on empty
// input. Report formatting rounds to two decimals.
LatencyStats latency_stats(const std::vector<double>& samples);

// Expert label file, JSON Lines:
//   {"utterance_id":"...","proposal_index":0,"category":1,
//    "label":"appropriate","approach":3}
// "approach" is an optional extension; records without it apply to every
// approach.
struct LabelRecord {
  std::string utterance_id;
  int proposal_index = 0;
  int category = 1;
  AppropriatenessLabel label = AppropriatenessLabel::Appropriate;
  std::optional<int> approach;
};

std::vector<LabelRecord> load_labels(std::istream& in);
std::vector<LabelRecord> load_labels_file(const std::string& path);

struct ApproachReport {
  Tallies tallies;
  bool has_tallies = false;
  AlignmentCounts alignment;
  std::optional<LatencyStats> latency;
  int utterances_evaluated = 0;
  int proposals_total = 0;
  std::vector<std::string> failures;  // per-utterance selection failures
};

struct EvalReport {
  std::map<int, ApproachReport> approaches;
  std::vector<std::string> warnings;
};

// Runs selection for every test utterance under every config, aligns the
// proposals against the test annotations, and merges externally supplied
// appropriateness labels. Selection failures are recorded per utterance,
// never fatal.
EvalReport compare_approaches(const Corpus& corpus,
                              const std::vector<PromptConfig>& configs,
                              Backend& backend,
                              const std::vector<LabelRecord>* labels = nullptr,
                              int tolerance = 2,
                              const GestureLexicon& lexicon = GestureLexicon::builtin());

std::string report_to_json(const EvalReport& report);
std::string report_to_table(const EvalReport& report);

}  // namespace gesturegen

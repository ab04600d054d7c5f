#pragma once

#include <optional>
#include <set>
#include <string>
#include <vector>

#include "gesturegen/backend.hpp"
#include "gesturegen/lexicon.hpp"
#include "gesturegen/prompts.hpp"
#include "gesturegen/textproc.hpp"

namespace gesturegen {

// Prompting approaches form a 2x2 factorial:
//   0 - no prior information, free gesture suggestion
//   1 - intent definitions only
//   2 - training annotations only
//   3 - intent definitions and training annotations
struct PromptConfig {
  int approach = 3;
  double temperature = 0.2;
  int max_tokens = 256;
  double frequency_penalty = 0.0;
  bool truncated = false;  // ask only intent + phrase
  int retries = 2;

  CompletionParams completion_params() const {
    return CompletionParams{temperature, max_tokens, frequency_penalty};
  }
};

enum class SpatialPos { Left, Center, Right };
using SpatialSet = std::set<SpatialPos>;

std::string to_string(const SpatialSet& set);

// One model-proposed gesture. The span is always re-derived locally from
// the phrase via locate_phrase; model-reported word numbers are never
// trusted.
struct GestureProposal {
  std::string intent;
  std::string phrase;
  WordSpan span;
  std::optional<std::string> physical_description;
  std::optional<SpatialSet> spatial_begin;
  std::optional<SpatialSet> spatial_end;
  std::optional<std::string> image_schema;
  bool rheme_aligned = false;  // set by discourse prioritization

  bool operator==(const GestureProposal&) const = default;
};

// Throws ConfigError when corpus is null for approaches 2 and 3.
std::string build_prompt(const PromptConfig& config, const Utterance& utt,
                         const GestureLexicon& lexicon, const Corpus* corpus,
                         const PromptLibrary& prompts = PromptLibrary::builtin());

std::string build_spatial_prompt(const Utterance& utt,
                                 const PromptLibrary& prompts = PromptLibrary::builtin());

enum class ParseStatus {
  Ok,      // at least one proposal survived validation
  NoJson,  // no JSON value found in the raw text; drives a retry
  Empty,   // JSON found but zero valid records remained
};

struct ProposalParse {
  ParseStatus status = ParseStatus::Empty;
  std::vector<GestureProposal> proposals;
  std::vector<std::string> warnings;  // dropped records, unresolvable phrases
};

// Tolerant extraction of the first JSON value from raw model output
// (models wrap JSON in prose and code fences). Never throws, whatever the
// input bytes.
ProposalParse parse_proposals(const std::string& raw, const Utterance& utt);

// Parses the bracketed spatial answer format:
//   [Type of Image Schema: PATH]
//   ["phrase" : gesture description : Spatially Begins:Left and Right :
//    Spatially Ends:Center]
// Records may wrap across lines. Unparseable groups are skipped with a
// warning. Spans are resolved against utt when provided.
ProposalParse parse_spatial_proposals(const std::string& raw,
                                      const Utterance* utt = nullptr);

struct SelectionResult {
  std::vector<GestureProposal> proposals;
  std::vector<BackendExchange> exchanges;  // one per attempt, last one final
  std::vector<std::string> warnings;

  const BackendExchange& final_exchange() const { return exchanges.back(); }
};

// Builds the prompt, queries the backend, parses. When no JSON value can
// be extracted the query is retried (up to config.retries) with a format
// reminder appended. Throws SelectionFailure with all raw responses once
// retries are exhausted; BackendUnavailable propagates immediately.
SelectionResult select_gestures(const Utterance& utt, const PromptConfig& config,
                                Backend& backend, const GestureLexicon& lexicon,
                                const Corpus* corpus,
                                const PromptLibrary& prompts = PromptLibrary::builtin());

// Spatial ideational-unit variant: asks for image schemas with where each
// gesture spatially begins and ends. Throws EmptyProposalSet when the
// answer contains no parseable records.
SelectionResult spatial_select(const Utterance& utt, Backend& backend,
                               const PromptLibrary& prompts = PromptLibrary::builtin());

}  // namespace gesturegen

#include "gesturegen/selector.hpp"

#include <algorithm>
#include <cctype>
#include <chrono>

#include "gesturegen/errors.hpp"
#include "json.hpp"

namespace gesturegen {

namespace {

using nlohmann::json;

std::string format_intent_list(const GestureLexicon& lexicon) {
  std::string out;
  for (const IntentDefinition& def : lexicon.intents()) {
    out += "- " + def.name + ": " + def.definition + "\n";
  }
  if (!out.empty()) out.pop_back();
  return out;
}

std::string format_examples(const Corpus& corpus) {
  std::string out;
  for (const AnnotationRecord& ann : corpus.training) {
    const Utterance& utt = corpus.utterance(ann.utterance_id);
    out += "- Utterance: \"" + utt.text + "\" | Intent: " +
           (ann.intent ? *ann.intent : std::string(to_string(ann.category))) +
           " | Phrase: \"" + utt.phrase_text(ann.span) + "\"\n";
  }
  if (!out.empty()) out.pop_back();
  return out;
}

std::string trimmed(std::string_view s) {
  size_t begin = s.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  size_t end = s.find_last_not_of(" \t\r\n");
  return std::string(s.substr(begin, end - begin + 1));
}

// Locates the first parseable JSON value in free-form model output by
// bracket-balance scanning from every '[' or '{' candidate.
std::optional<json> first_json_value(const std::string& raw) {
  for (size_t i = 0; i < raw.size(); ++i) {
    char open = raw[i];
    if (open != '[' && open != '{') continue;
    char close = open == '[' ? ']' : '}';
    int depth = 0;
    bool in_string = false;
    for (size_t j = i; j < raw.size(); ++j) {
      char c = raw[j];
      if (in_string) {
        if (c == '\\') {
          ++j;
        } else if (c == '"') {
          in_string = false;
        }
        continue;
      }
      if (c == '"') {
        in_string = true;
      } else if (c == '[' || c == '{') {
        ++depth;
      } else if (c == ']' || c == '}') {
        --depth;
        if (depth == 0) {
          if (c != close) break;  // mismatched brackets, try next candidate
          json value = json::parse(raw.substr(i, j - i + 1), nullptr, false);
          if (!value.is_discarded()) return value;
          break;
        }
      }
    }
  }
  return std::nullopt;
}

std::optional<GestureProposal> proposal_from_record(const json& rec,
                                                    const Utterance& utt,
                                                    std::vector<std::string>& warnings) {
  if (!rec.is_object()) {
    warnings.push_back("skipped non-object proposal record");
    return std::nullopt;
  }
  GestureProposal p;
  if (rec.contains("intent") && rec["intent"].is_string()) {
    p.intent = trimmed(rec["intent"].get<std::string>());
  } else if (rec.contains("gesture") && rec["gesture"].is_string()) {
    p.intent = trimmed(rec["gesture"].get<std::string>());
  }
  if (p.intent.empty()) {
    warnings.push_back("skipped proposal without an intent");
    return std::nullopt;
  }
  if (!rec.contains("phrase") || !rec["phrase"].is_string()) {
    warnings.push_back("skipped proposal without a phrase (intent '" + p.intent + "')");
    return std::nullopt;
  }
  p.phrase = trimmed(rec["phrase"].get<std::string>());
  if (p.phrase.empty()) {
    warnings.push_back("skipped proposal with empty phrase (intent '" + p.intent + "')");
    return std::nullopt;
  }
  for (const char* key : {"description", "physical_description"}) {
    if (rec.contains(key) && rec[key].is_string()) {
      p.physical_description = rec[key].get<std::string>();
      break;
    }
  }
  std::optional<WordSpan> span = locate_phrase(utt, p.phrase);
  if (!span) {
    warnings.push_back("dropped proposal: phrase \"" + p.phrase +
                       "\" not found in utterance '" + utt.id + "'");
    return std::nullopt;
  }
  p.span = *span;
  return p;
}

double elapsed_seconds(std::chrono::steady_clock::time_point begin) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin)
      .count();
}

constexpr const char* kFormatReminder =
    "\nReminder: answer with only a JSON array of objects with keys "
    "\"intent\" and \"phrase\" (and optionally \"description\"). No prose.";

}  // namespace

std::string to_string(const SpatialSet& set) {
  std::string out;
  for (SpatialPos pos : set) {
    if (!out.empty()) out += "+";
    switch (pos) {
      case SpatialPos::Left: out += "left"; break;
      case SpatialPos::Center: out += "center"; break;
      case SpatialPos::Right: out += "right"; break;
    }
  }
  return out;
}

std::string build_prompt(const PromptConfig& config, const Utterance& utt,
                         const GestureLexicon& lexicon, const Corpus* corpus,
                         const PromptLibrary& prompts) {
  if (config.approach < 0 || config.approach > 3) {
    throw ConfigError("approach must be 0..3, got " + std::to_string(config.approach));
  }
  const bool wants_intents = config.approach == 1 || config.approach == 3;
  const bool wants_examples = config.approach == 2 || config.approach == 3;
  if (wants_examples && corpus == nullptr) {
    throw ConfigError("approach " + std::to_string(config.approach) +
                      " needs a corpus of training annotations");
  }
  std::string intent_block;
  if (wants_intents) {
    intent_block = fill_placeholder(prompts.intent_block, "INTENT_LIST",
                                    format_intent_list(lexicon));
  }
  std::string example_block;
  if (wants_examples) {
    example_block = fill_placeholder(prompts.example_block, "EXAMPLES",
                                     format_examples(*corpus));
  }
  std::string text = prompts.selection;
  text = fill_placeholder(std::move(text), "INTENT_BLOCK", intent_block);
  text = fill_placeholder(std::move(text), "EXAMPLE_BLOCK", example_block);
  text = fill_placeholder(std::move(text), "TASK",
                          config.approach == 0 ? prompts.task_free : prompts.task_intents);
  text = fill_placeholder(std::move(text), "OUTPUT_SPEC",
                          config.truncated ? prompts.output_truncated : prompts.output_full);
  text = fill_placeholder(std::move(text), "UTTERANCE", utt.text);
  return text;
}

std::string build_spatial_prompt(const Utterance& utt, const PromptLibrary& prompts) {
  return fill_placeholder(prompts.spatial, "UTTERANCE", utt.text);
}

ProposalParse parse_proposals(const std::string& raw, const Utterance& utt) {
  ProposalParse result;
  std::optional<json> value = first_json_value(raw);
  if (!value) {
    result.status = ParseStatus::NoJson;
    return result;
  }
  json records = json::array();
  if (value->is_array()) {
    records = *value;
  } else if (value->is_object()) {
    // Tolerated shapes: a single proposal object, or a wrapper object
    // holding the array under a conventional key.
    bool unwrapped = false;
    for (const char* key : {"gestures", "proposals"}) {
      if (value->contains(key) && (*value)[key].is_array()) {
        records = (*value)[key];
        unwrapped = true;
        break;
      }
    }
    if (!unwrapped) records.push_back(*value);
  }
  for (const json& rec : records) {
    if (auto p = proposal_from_record(rec, utt, result.warnings)) {
      result.proposals.push_back(std::move(*p));
    }
  }
  result.status = result.proposals.empty() ? ParseStatus::Empty : ParseStatus::Ok;
  return result;
}

namespace {

std::string collapse_ws(std::string_view s) {
  std::string out;
  bool pending_space = false;
  for (char c : s) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      pending_space = !out.empty();
      continue;
    }
    if (pending_space) {
      out += ' ';
      pending_space = false;
    }
    out += c;
  }
  return out;
}

std::string strip_outer_quotes(std::string s) {
  s = trimmed(s);
  if (s.compare(0, 3, "\xE2\x80\x9C") == 0 || s.compare(0, 3, "\xE2\x80\x9D") == 0) {
    s.erase(0, 3);
  } else if (!s.empty() && (s.front() == '"' || s.front() == '\'')) {
    s.erase(0, 1);
  }
  if (s.size() >= 3 && (s.compare(s.size() - 3, 3, "\xE2\x80\x9D") == 0 ||
                        s.compare(s.size() - 3, 3, "\xE2\x80\x9C") == 0)) {
    s.erase(s.size() - 3);
  } else if (!s.empty() && (s.back() == '"' || s.back() == '\'')) {
    s.pop_back();
  }
  return trimmed(s);
}

std::optional<SpatialSet> parse_spatial_set(std::string_view text) {
  SpatialSet set;
  std::string word;
  auto flush = [&]() -> bool {
    if (word.empty()) return true;
    if (word == "left") set.insert(SpatialPos::Left);
    else if (word == "center" || word == "centre") set.insert(SpatialPos::Center);
    else if (word == "right") set.insert(SpatialPos::Right);
    else if (word != "and") return false;
    word.clear();
    return true;
  };
  for (char c : text) {
    if (std::isalpha(static_cast<unsigned char>(c))) {
      word += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
    } else if (!flush()) {
      return std::nullopt;
    }
  }
  if (!flush() || set.empty()) return std::nullopt;
  return set;
}

// Splits bracket contents on ':' and re-joins around the two "Spatially"
// labels, since gesture descriptions may themselves contain colons.
std::vector<std::string> split_fields(const std::string& content) {
  std::vector<std::string> fields;
  std::string current;
  for (char c : content) {
    if (c == ':') {
      fields.push_back(trimmed(current));
      current.clear();
    } else {
      current += c;
    }
  }
  fields.push_back(trimmed(current));
  return fields;
}

bool equals_ci(std::string_view a, std::string_view b) {
  if (a.size() != b.size()) return false;
  for (size_t i = 0; i < a.size(); ++i) {
    if (std::tolower(static_cast<unsigned char>(a[i])) !=
        std::tolower(static_cast<unsigned char>(b[i]))) {
      return false;
    }
  }
  return true;
}

}  // namespace

ProposalParse parse_spatial_proposals(const std::string& raw, const Utterance* utt) {
  ProposalParse result;
  std::string current_schema;
  size_t pos = 0;
  while ((pos = raw.find('[', pos)) != std::string::npos) {
    size_t end = raw.find(']', pos + 1);
    if (end == std::string::npos) break;
    std::string content = collapse_ws(raw.substr(pos + 1, end - pos - 1));
    pos = end + 1;
    if (content.empty()) continue;

    std::vector<std::string> fields = split_fields(content);
    if (!fields.empty() && equals_ci(fields[0], "type of image schema")) {
      current_schema = fields.size() > 1 ? trimmed(fields[1]) : "";
      continue;
    }
    auto find_label = [&](std::string_view label) -> int {
      for (size_t i = 0; i < fields.size(); ++i) {
        if (equals_ci(fields[i], label)) return static_cast<int>(i);
      }
      return -1;
    };
    int begins_at = find_label("spatially begins");
    int ends_at = find_label("spatially ends");
    if (begins_at < 1 || ends_at <= begins_at || ends_at + 1 >= static_cast<int>(fields.size())) {
      result.warnings.push_back("skipped unparseable spatial record: [" + content + "]");
      continue;
    }
    GestureProposal p;
    p.phrase = strip_outer_quotes(fields[0]);
    if (p.phrase.empty()) {
      result.warnings.push_back("skipped spatial record with empty phrase");
      continue;
    }
    std::string gesture;
    for (int i = 1; i < begins_at; ++i) {
      if (!gesture.empty()) gesture += ": ";
      gesture += fields[static_cast<size_t>(i)];
    }
    std::string begins_text;
    for (int i = begins_at + 1; i < ends_at; ++i) {
      begins_text += fields[static_cast<size_t>(i)];
    }
    std::string ends_text;
    for (size_t i = static_cast<size_t>(ends_at) + 1; i < fields.size(); ++i) {
      ends_text += fields[i];
    }
    std::optional<SpatialSet> begins = parse_spatial_set(begins_text);
    std::optional<SpatialSet> ends = parse_spatial_set(ends_text);
    if (!begins || !ends) {
      result.warnings.push_back("skipped spatial record with bad locations: [" + content + "]");
      continue;
    }
    p.image_schema = current_schema.empty() ? std::nullopt
                                            : std::optional<std::string>(current_schema);
    p.intent = current_schema.empty() ? "Gesture" : current_schema;
    if (!gesture.empty()) p.physical_description = gesture;
    p.spatial_begin = std::move(begins);
    p.spatial_end = std::move(ends);
    if (utt != nullptr) {
      std::optional<WordSpan> span = locate_phrase(*utt, p.phrase);
      if (!span) {
        result.warnings.push_back("dropped spatial proposal: phrase \"" + p.phrase +
                                  "\" not found in utterance");
        continue;
      }
      p.span = *span;
    }
    result.proposals.push_back(std::move(p));
  }
  result.status = result.proposals.empty() ? ParseStatus::Empty : ParseStatus::Ok;
  return result;
}

SelectionResult select_gestures(const Utterance& utt, const PromptConfig& config,
                                Backend& backend, const GestureLexicon& lexicon,
                                const Corpus* corpus, const PromptLibrary& prompts) {
  SelectionResult result;
  if (utt.token_count() == 0) {
    result.exchanges.push_back(BackendExchange{"", "", 0.0, backend.model_id()});
    return result;
  }
  const std::string prompt = build_prompt(config, utt, lexicon, corpus, prompts);
  const int attempts = 1 + std::max(0, config.retries);
  std::vector<std::string> raw_responses;
  for (int attempt = 0; attempt < attempts; ++attempt) {
    std::string attempt_prompt = attempt == 0 ? prompt : prompt + kFormatReminder;
    auto begin = std::chrono::steady_clock::now();
    std::string raw = backend.complete(attempt_prompt, config.completion_params());
    result.exchanges.push_back(BackendExchange{attempt_prompt, raw,
                                               elapsed_seconds(begin),
                                               backend.model_id()});
    raw_responses.push_back(raw);
    ProposalParse parsed = parse_proposals(raw, utt);
    result.warnings.insert(result.warnings.end(), parsed.warnings.begin(),
                           parsed.warnings.end());
    if (parsed.status != ParseStatus::NoJson) {
      result.proposals = std::move(parsed.proposals);
      return result;
    }
  }
  throw SelectionFailure("no JSON proposals after " + std::to_string(attempts) +
                             " attempts for utterance '" + utt.id + "'",
                         std::move(raw_responses));
}

SelectionResult spatial_select(const Utterance& utt, Backend& backend,
                               const PromptLibrary& prompts) {
  SelectionResult result;
  const std::string prompt = build_spatial_prompt(utt, prompts);
  auto begin = std::chrono::steady_clock::now();
  std::string raw = backend.complete(prompt, CompletionParams{});
  result.exchanges.push_back(
      BackendExchange{prompt, raw, elapsed_seconds(begin), backend.model_id()});
  ProposalParse parsed = parse_spatial_proposals(raw, &utt);
  result.warnings = std::move(parsed.warnings);
  if (parsed.status != ParseStatus::Ok) {
    throw EmptyProposalSet("no spatial gesture records for utterance '" +
                           utt.id + "'");
  }
  result.proposals = std::move(parsed.proposals);
  return result;
}

}  // namespace gesturegen

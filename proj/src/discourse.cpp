#include "gesturegen/discourse.hpp"

#include <algorithm>
#include <fstream>
#include <istream>

#include "gesturegen/errors.hpp"
#include "json.hpp"

namespace gesturegen {

namespace {

using nlohmann::json;

// Locates a JSON object carrying theme/rheme phrases in free-form output.
struct RhemeThemePhrases {
  std::optional<std::string> theme;
  std::string rheme;
};

std::optional<RhemeThemePhrases> parse_rheme_response(const std::string& raw) {
  size_t pos = raw.find('{');
  while (pos != std::string::npos) {
    int depth = 0;
    bool in_string = false;
    for (size_t j = pos; j < raw.size(); ++j) {
      char c = raw[j];
      if (in_string) {
        if (c == '\\') ++j;
        else if (c == '"') in_string = false;
        continue;
      }
      if (c == '"') in_string = true;
      else if (c == '{') ++depth;
      else if (c == '}') {
        if (--depth == 0) {
          json value = json::parse(raw.substr(pos, j - pos + 1), nullptr, false);
          if (!value.is_discarded() && value.is_object() &&
              value.contains("rheme") && value["rheme"].is_string()) {
            RhemeThemePhrases out;
            out.rheme = value["rheme"].get<std::string>();
            if (value.contains("theme") && value["theme"].is_string()) {
              std::string theme = value["theme"].get<std::string>();
              if (!theme.empty()) out.theme = std::move(theme);
            }
            return out;
          }
          break;
        }
      }
    }
    pos = raw.find('{', pos + 1);
  }
  return std::nullopt;
}

}  // namespace

RhemeTheme analyze_rheme_theme(const Utterance& utt, Backend& backend,
                               const PromptLibrary& prompts) {
  if (utt.token_count() == 0) {
    throw ValidationError("cannot analyze an empty utterance");
  }
  const WordSpan whole{0, utt.token_count() - 1};
  const std::string prompt = fill_placeholder(prompts.rheme_theme, "UTTERANCE", utt.text);

  for (int attempt = 0; attempt < 2; ++attempt) {
    std::string raw = backend.complete(prompt, CompletionParams{});
    std::optional<RhemeThemePhrases> phrases = parse_rheme_response(raw);
    if (!phrases) continue;
    std::optional<WordSpan> rheme = locate_phrase(utt, phrases->rheme);
    if (!rheme) continue;

    RhemeTheme rt;
    std::optional<WordSpan> theme;
    if (phrases->theme) theme = locate_phrase(utt, *phrases->theme);
    if (!theme) {
      // No usable theme: the whole utterance counts as rheme.
      rt.rheme_span = whole;
      return rt;
    }
    if (theme->overlaps(*rheme)) {
      // Conflicting split; the rheme is the signal worth keeping.
      rt.rheme_span = *rheme;
      return rt;
    }
    rt.theme_span = theme;
    rt.rheme_span = *rheme;
    return rt;
  }
  throw DiscourseFailure("rheme phrase unresolvable for utterance '" + utt.id + "'");
}

std::vector<GestureProposal> prioritize(std::vector<GestureProposal> proposals,
                                        const RhemeTheme& rt) {
  for (GestureProposal& p : proposals) {
    p.rheme_aligned = p.span.overlaps(rt.rheme_span);
  }
  std::stable_partition(proposals.begin(), proposals.end(),
                        [](const GestureProposal& p) { return p.rheme_aligned; });
  return proposals;
}

CoverageCount rheme_coverage(const std::vector<AnnotationRecord>& annotations,
                             const std::map<std::string, RhemeTheme>& analyses,
                             OverlapRule rule) {
  CoverageCount count;
  for (const AnnotationRecord& ann : annotations) {
    auto it = analyses.find(ann.utterance_id);
    if (it == analyses.end()) {
      throw ReferentialError("no rheme analysis for utterance '" +
                             ann.utterance_id + "'");
    }
    const WordSpan& rheme = it->second.rheme_span;
    bool within = rule == OverlapRule::AnyToken ? ann.span.overlaps(rheme)
                                                : rheme.contains(ann.span);
    if (within) {
      ++count.within_rheme;
    } else {
      ++count.outside_rheme;
      ++count.outside_by_category[ann.category];
    }
  }
  return count;
}

std::map<std::string, RhemeTheme> load_rheme_fixture(std::istream& in) {
  std::map<std::string, RhemeTheme> analyses;
  std::string line;
  int line_no = 0;
  auto read_span = [](const json& value, int no) -> WordSpan {
    if (!value.is_array() || value.size() != 2 || !value[0].is_number_integer() ||
        !value[1].is_number_integer()) {
      throw ParseError("line " + std::to_string(no) + ": span must be [start,end]");
    }
    WordSpan span{value[0].get<int>(), value[1].get<int>()};
    if (span.start < 0 || span.start > span.end) {
      throw ParseError("line " + std::to_string(no) + ": invalid span");
    }
    return span;
  };
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      throw ParseError("line " + std::to_string(line_no) + ": not a JSON object");
    }
    try {
      std::string id = rec.at("utterance_id").get<std::string>();
      RhemeTheme rt;
      rt.rheme_span = read_span(rec.at("rheme"), line_no);
      if (rec.contains("theme") && !rec["theme"].is_null()) {
        rt.theme_span = read_span(rec["theme"], line_no);
        if (rt.theme_span->overlaps(rt.rheme_span)) {
          throw ParseError("line " + std::to_string(line_no) +
                           ": theme and rheme spans overlap");
        }
      }
      analyses[id] = rt;
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return analyses;
}

std::map<std::string, RhemeTheme> load_rheme_fixture_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open rheme fixture: " + path);
  return load_rheme_fixture(in);
}

}  // namespace gesturegen

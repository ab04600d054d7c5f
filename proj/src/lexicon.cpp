#include "gesturegen/lexicon.hpp"

#include <cctype>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gesturegen/errors.hpp"
#include "json.hpp"

namespace gesturegen {

namespace {

using nlohmann::json;

std::string fold_name(std::string_view name) {
  size_t begin = 0;
  size_t end = name.size();
  while (begin < end && std::isspace(static_cast<unsigned char>(name[begin]))) ++begin;
  while (end > begin && std::isspace(static_cast<unsigned char>(name[end - 1]))) --end;
  std::string out;
  out.reserve(end - begin);
  for (size_t i = begin; i < end; ++i) {
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(name[i])));
  }
  return out;
}

}  // namespace

const std::vector<IntentDefinition>& builtin_intents() {
  static const std::vector<IntentDefinition> kIntents = {
      {"Progress",
       "This gesture represents progress, advancement, or moving forward. It "
       "is part of the path group image schema.",
       "path group"},
      {"Regress",
       "This gesture represents moving backward, regressing, or returning to "
       "a previous point. It is part of the path group image schema.",
       "path group"},
      {"Cycle",
       "This gesture represents actions or processes that repeat in a "
       "continuous loop or follow a recurring pattern. It is an image schema.",
       std::nullopt},
      {"Collect",
       "This gesture represents gathering, collecting, or bringing things "
       "together, into one entity. It is an image schema.",
       std::nullopt},
      {"Container",
       "This gesture represents a boundary, a sweep, or an imaginary box "
       "holding a collection of items. This is an image schema and basis for "
       "the container metaphoric gesture.",
       std::nullopt},
      {"Oscillation",
       "This gesture represents alternation, uncertainty, indecision, or "
       "items being out of balance. It is part of the balance group image "
       "schema.",
       "balance group"},
      {"Temporal",
       "There are many, culture-specific time metaphors. Here we refer to "
       "representing time as a line, with different points on the line "
       "representing past, present, and future.",
       std::nullopt},
  };
  return kIntents;
}

GestureLexicon GestureLexicon::builtin() {
  GestureLexicon lex;
  for (const IntentDefinition& def : builtin_intents()) {
    lex.add_intent(def, def.name);
  }
  return lex;
}

void GestureLexicon::set_fallback_lexeme(std::string lexeme) {
  fallback_lexeme_ = std::move(lexeme);
}

void GestureLexicon::add_intent(IntentDefinition def, std::string lexeme,
                                std::string bml_type) {
  lexeme_map_[fold_name(def.name)] = Entry{std::move(lexeme), std::move(bml_type)};
  intents_.push_back(std::move(def));
}

ResolvedLexeme GestureLexicon::resolve(std::string_view intent_name) const {
  auto it = lexeme_map_.find(fold_name(intent_name));
  if (it == lexeme_map_.end()) {
    return ResolvedLexeme{fallback_lexeme_, "METAPHORIC", default_emotion_, true};
  }
  return ResolvedLexeme{it->second.lexeme, it->second.bml_type, default_emotion_, false};
}

ResolvedLexeme resolve_lexeme(const GestureLexicon& lexicon,
                              std::string_view intent_name) {
  return lexicon.resolve(intent_name);
}

std::string_view to_string(GestureCategory category) {
  switch (category) {
    case GestureCategory::Deictic: return "deictic";
    case GestureCategory::Beat: return "beat";
    case GestureCategory::Metaphoric: return "metaphoric";
    case GestureCategory::Iconic: return "iconic";
  }
  return "metaphoric";
}

GestureCategory parse_gesture_category(std::string_view text) {
  std::string folded = fold_name(text);
  if (folded == "deictic") return GestureCategory::Deictic;
  if (folded == "beat") return GestureCategory::Beat;
  if (folded == "metaphoric") return GestureCategory::Metaphoric;
  if (folded == "iconic") return GestureCategory::Iconic;
  throw ParseError("unknown gesture category: '" + std::string(text) + "'");
}

std::set<std::string> Corpus::training_ids() const {
  std::set<std::string> ids;
  for (const AnnotationRecord& rec : training) ids.insert(rec.utterance_id);
  return ids;
}

std::set<std::string> Corpus::test_ids() const {
  std::set<std::string> ids;
  for (const AnnotationRecord& rec : test) ids.insert(rec.utterance_id);
  return ids;
}

const Utterance& Corpus::utterance(const std::string& id) const {
  auto it = utterances.find(id);
  if (it == utterances.end()) {
    throw ReferentialError("unknown utterance id: '" + id + "'");
  }
  return it->second;
}

namespace {

AnnotationRecord parse_annotation(const json& rec, int line_no) {
  AnnotationRecord out;
  out.utterance_id = rec.at("utterance_id").get<std::string>();
  const json& span = rec.at("span");
  if (!span.is_array() || span.size() != 2 || !span[0].is_number_integer() ||
      !span[1].is_number_integer()) {
    throw ParseError("line " + std::to_string(line_no) +
                     ": span must be [start,end]");
  }
  out.span = WordSpan{span[0].get<int>(), span[1].get<int>()};
  if (out.span.start > out.span.end || out.span.start < 0) {
    throw ParseError("line " + std::to_string(line_no) + ": invalid span [" +
                     std::to_string(out.span.start) + "," +
                     std::to_string(out.span.end) + "]");
  }
  if (rec.contains("intent") && !rec["intent"].is_null()) {
    out.intent = rec["intent"].get<std::string>();
  }
  out.category = parse_gesture_category(rec.at("category").get<std::string>());
  return out;
}

}  // namespace

Corpus load_corpus(std::istream& in) {
  Corpus corpus;
  std::string line;
  int line_no = 0;
  std::vector<std::pair<int, AnnotationRecord>> training;
  std::vector<std::pair<int, AnnotationRecord>> test;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      throw ParseError("line " + std::to_string(line_no) +
                       ": not a JSON object record");
    }
    try {
      if (rec.value("type", "") == "header") continue;
      if (!rec.contains("utterance_id")) {
        throw ParseError("line " + std::to_string(line_no) +
                         ": record missing utterance_id");
      }
      if (rec.contains("text")) {
        std::string id = rec.at("utterance_id").get<std::string>();
        if (corpus.utterances.count(id) != 0) {
          throw ParseError("line " + std::to_string(line_no) +
                           ": duplicate utterance id '" + id + "'");
        }
        corpus.utterances.emplace(id, tokenize(rec.at("text").get<std::string>(), id));
      } else {
        AnnotationRecord ann = parse_annotation(rec, line_no);
        std::string split = rec.at("split").get<std::string>();
        if (split == "training") {
          training.emplace_back(line_no, std::move(ann));
        } else if (split == "test") {
          test.emplace_back(line_no, std::move(ann));
        } else {
          throw ParseError("line " + std::to_string(line_no) +
                           ": unknown split '" + split + "'");
        }
      }
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }

  auto check = [&](const std::vector<std::pair<int, AnnotationRecord>>& recs,
                   std::vector<AnnotationRecord>& out) {
    for (const auto& [no, ann] : recs) {
      auto it = corpus.utterances.find(ann.utterance_id);
      if (it == corpus.utterances.end()) {
        throw ReferentialError("line " + std::to_string(no) +
                               ": annotation references unknown utterance '" +
                               ann.utterance_id + "'");
      }
      if (!it->second.valid_span(ann.span)) {
        throw ParseError("line " + std::to_string(no) + ": span [" +
                         std::to_string(ann.span.start) + "," +
                         std::to_string(ann.span.end) +
                         "] exceeds token count of '" + ann.utterance_id + "'");
      }
      out.push_back(ann);
    }
  };
  check(training, corpus.training);
  check(test, corpus.test);

  std::set<std::string> train_ids = corpus.training_ids();
  for (const std::string& id : corpus.test_ids()) {
    if (train_ids.count(id) != 0) {
      throw ValidationError("utterance '" + id +
                            "' appears in both training and test splits");
    }
  }
  return corpus;
}

Corpus load_corpus_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open corpus file: " + path);
  return load_corpus(in);
}

void save_corpus(const Corpus& corpus, std::ostream& out) {
  json header = {{"type", "header"},
                 {"format", "gesture-corpus"},
                 {"version", 1},
                 {"splits", {"training", "test"}}};
  out << header.dump() << '\n';
  for (const auto& [id, utt] : corpus.utterances) {
    json rec = {{"utterance_id", id}, {"text", utt.text}};
    out << rec.dump() << '\n';
  }
  auto write = [&](const std::vector<AnnotationRecord>& recs, const char* split) {
    for (const AnnotationRecord& ann : recs) {
      json rec = {{"utterance_id", ann.utterance_id},
                  {"span", {ann.span.start, ann.span.end}},
                  {"category", std::string(to_string(ann.category))},
                  {"split", split}};
      if (ann.intent) rec["intent"] = *ann.intent;
      out << rec.dump() << '\n';
    }
  };
  write(corpus.training, "training");
  write(corpus.test, "test");
}

}  // namespace gesturegen

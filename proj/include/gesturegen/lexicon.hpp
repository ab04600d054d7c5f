#pragma once

#include <iosfwd>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "gesturegen/textproc.hpp"

namespace gesturegen {

struct IntentDefinition {
  std::string name;
  std::string definition;
  std::optional<std::string> schema_group;

  bool operator==(const IntentDefinition&) const = default;
};

// The seven built-in gestural intents, in fixed order, each with the prose
// definition used verbatim in prompts.
const std::vector<IntentDefinition>& builtin_intents();

struct ResolvedLexeme {
  std::string lexeme;
  std::string bml_type;
  std::string emotion;
  bool fallback = false;  // intent was not in the lexeme map
};

// Maps intent names to animation lexemes. Names are compared
// case-insensitively after trimming, since model output varies in casing.
// Unknown (novel) intents resolve to a configurable generic lexeme instead
// of failing, so the pipeline stays total when the model invents intents.
class GestureLexicon {
 public:
  // Built-in intents with identity lexeme mapping, type METAPHORIC,
  // emotion "neutral".
  static GestureLexicon builtin();

  const std::vector<IntentDefinition>& intents() const { return intents_; }
  const std::string& default_emotion() const { return default_emotion_; }
  const std::string& fallback_lexeme() const { return fallback_lexeme_; }
  void set_fallback_lexeme(std::string lexeme);

  void add_intent(IntentDefinition def, std::string lexeme,
                  std::string bml_type = "METAPHORIC");

  // Total: never fails, any unmapped name takes the fallback path.
  ResolvedLexeme resolve(std::string_view intent_name) const;

 private:
  std::vector<IntentDefinition> intents_;
  struct Entry {
    std::string lexeme;
    std::string bml_type;
  };
  std::map<std::string, Entry> lexeme_map_;  // keyed by folded name
  std::string default_emotion_ = "neutral";
  std::string fallback_lexeme_ = "GenericMetaphoric";
};

ResolvedLexeme resolve_lexeme(const GestureLexicon& lexicon,
                              std::string_view intent_name);

enum class GestureCategory { Deictic, Beat, Metaphoric, Iconic };

std::string_view to_string(GestureCategory category);
GestureCategory parse_gesture_category(std::string_view text);

// One annotated gesture: where in an utterance the speaker gestured,
// optionally which intent it realized, and its McNeill-style category.
struct AnnotationRecord {
  std::string utterance_id;
  WordSpan span;
  std::optional<std::string> intent;
  GestureCategory category = GestureCategory::Metaphoric;

  bool operator==(const AnnotationRecord&) const = default;
};

struct Corpus {
  std::map<std::string, Utterance> utterances;
  std::vector<AnnotationRecord> training;
  std::vector<AnnotationRecord> test;

  bool operator==(const Corpus&) const = default;

  std::set<std::string> training_ids() const;
  std::set<std::string> test_ids() const;
  const Utterance& utterance(const std::string& id) const;
};

// Corpus file format: UTF-8 JSON Lines. An optional header line
//   {"type":"header","format":"gesture-corpus","version":1,
//    "splits":["training","test"]}
// is followed by one record per line:
//   {"utterance_id":"...","text":"..."}
//   {"utterance_id":"...","span":[start,end],"intent":"...",
//    "category":"metaphoric","split":"training"}
// Spans are 0-based inclusive token indices into the utterance.
Corpus load_corpus(std::istream& in);
Corpus load_corpus_file(const std::string& path);
void save_corpus(const Corpus& corpus, std::ostream& out);

}  // namespace gesturegen

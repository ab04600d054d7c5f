#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <random>
#include <sstream>

#include "doctest.h"
#include "gesturegen/errors.hpp"
#include "gesturegen/lexicon.hpp"
#include "support.hpp"

using namespace gesturegen;

TEST_CASE("builtin_intents returns the seven intents in order") {
  const std::vector<IntentDefinition>& intents = builtin_intents();
  REQUIRE(intents.size() == 7);
  std::vector<std::string> names;
  for (const IntentDefinition& def : intents) names.push_back(def.name);
  CHECK(names == std::vector<std::string>{"Progress", "Regress", "Cycle",
                                          "Collect", "Container", "Oscillation",
                                          "Temporal"});
  CHECK(intents[4].definition.find("a boundary, a sweep") != std::string::npos);
  CHECK(intents[0].schema_group == "path group");
  CHECK(intents[1].schema_group == "path group");
  CHECK(intents[5].schema_group == "balance group");
  for (const IntentDefinition& def : intents) {
    CHECK_FALSE(def.name.empty());
    CHECK_FALSE(def.definition.empty());
  }
  // Deterministic across calls.
  CHECK(builtin_intents() == intents);
}

TEST_CASE("resolve_lexeme maps builtins and falls back on novel intents") {
  GestureLexicon lexicon = GestureLexicon::builtin();

  ResolvedLexeme container = resolve_lexeme(lexicon, "Container");
  CHECK(container.lexeme == "Container");
  CHECK(container.bml_type == "METAPHORIC");
  CHECK(container.emotion == "neutral");
  CHECK_FALSE(container.fallback);

  ResolvedLexeme progress = resolve_lexeme(lexicon, "Progress");
  CHECK(progress.lexeme == "Progress");
  CHECK_FALSE(progress.fallback);

  ResolvedLexeme novel = resolve_lexeme(lexicon, "NovelSweep");
  CHECK(novel.lexeme == lexicon.fallback_lexeme());
  CHECK(novel.bml_type == "METAPHORIC");
  CHECK(novel.emotion == "neutral");
  CHECK(novel.fallback);
}

TEST_CASE("resolve_lexeme folds case and trims") {
  GestureLexicon lexicon = GestureLexicon::builtin();
  CHECK_FALSE(lexicon.resolve("container").fallback);
  CHECK_FALSE(lexicon.resolve("  CONTAINER ").fallback);
  CHECK_FALSE(lexicon.resolve("oscillation").fallback);
  CHECK(lexicon.resolve("").fallback);
}

TEST_CASE("resolve_lexeme is total on arbitrary strings (property)") {
  GestureLexicon lexicon = GestureLexicon::builtin();
  std::mt19937 rng(8001);
  std::uniform_int_distribution<int> len(0, 24);
  std::uniform_int_distribution<int> byte(1, 255);
  for (int round = 0; round < 500; ++round) {
    std::string name;
    int n = len(rng);
    for (int i = 0; i < n; ++i) name += static_cast<char>(byte(rng));
    ResolvedLexeme resolved = lexicon.resolve(name);
    CHECK_FALSE(resolved.lexeme.empty());
    CHECK_FALSE(resolved.bml_type.empty());
  }
}

TEST_CASE("load_corpus on empty stream") {
  std::istringstream empty("");
  Corpus corpus = load_corpus(empty);
  CHECK(corpus.utterances.empty());
  CHECK(corpus.training.empty());
  CHECK(corpus.test.empty());
}

TEST_CASE("load_corpus on the bundled replica corpus") {
  Corpus corpus = load_corpus_file(std::string(GESTUREGEN_DATA_DIR) + "/corpus.jsonl");
  CHECK(corpus.training_ids().size() == 21);
  CHECK(corpus.test_ids().size() == 20);
  CHECK(corpus.training.size() == 21);
  CHECK(corpus.test.size() == 28);
  CHECK(corpus.utterances.size() == 41);
  // Annotated spans resolve inside their utterances.
  for (const AnnotationRecord& ann : corpus.training) {
    CHECK(corpus.utterance(ann.utterance_id).valid_span(ann.span));
  }
}

TEST_CASE("load_corpus rejects malformed records") {
  SUBCASE("span end before start") {
    std::istringstream in(
        "{\"utterance_id\":\"u1\",\"text\":\"a b c\"}\n"
        "{\"utterance_id\":\"u1\",\"span\":[2,1],\"category\":\"beat\",\"split\":\"test\"}\n");
    CHECK_THROWS_AS(load_corpus(in), ParseError);
  }
  SUBCASE("error names the line number") {
    std::istringstream in(
        "{\"utterance_id\":\"u1\",\"text\":\"a b c\"}\n"
        "not json\n");
    CHECK_THROWS_WITH_AS(load_corpus(in), doctest::Contains("line 2"), ParseError);
  }
  SUBCASE("dangling utterance id") {
    std::istringstream in(
        "{\"utterance_id\":\"ghost\",\"span\":[0,0],\"category\":\"beat\",\"split\":\"test\"}\n");
    CHECK_THROWS_AS(load_corpus(in), ReferentialError);
  }
  SUBCASE("span beyond token count") {
    std::istringstream in(
        "{\"utterance_id\":\"u1\",\"text\":\"a b c\"}\n"
        "{\"utterance_id\":\"u1\",\"span\":[2,5],\"category\":\"beat\",\"split\":\"test\"}\n");
    CHECK_THROWS_AS(load_corpus(in), ParseError);
  }
  SUBCASE("id in both splits") {
    std::istringstream in(
        "{\"utterance_id\":\"u1\",\"text\":\"a b c\"}\n"
        "{\"utterance_id\":\"u1\",\"span\":[0,0],\"category\":\"beat\",\"split\":\"training\"}\n"
        "{\"utterance_id\":\"u1\",\"span\":[1,1],\"category\":\"beat\",\"split\":\"test\"}\n");
    CHECK_THROWS_AS(load_corpus(in), ValidationError);
  }
}

TEST_CASE("save_corpus then load_corpus is the identity (round-trip property)") {
  std::mt19937 rng(8002);
  std::uniform_int_distribution<int> utt_count(0, 8);
  std::uniform_int_distribution<int> ann_count(0, 3);
  std::uniform_int_distribution<int> category(0, 3);
  std::uniform_int_distribution<int> coin(0, 1);
  const GestureCategory kCategories[] = {GestureCategory::Deictic,
                                         GestureCategory::Beat,
                                         GestureCategory::Metaphoric,
                                         GestureCategory::Iconic};
  for (int round = 0; round < 50; ++round) {
    Corpus corpus;
    int n = utt_count(rng);
    std::vector<std::string> train_pool;
    std::vector<std::string> test_pool;
    for (int i = 0; i < n; ++i) {
      std::string id = "u" + std::to_string(round) + "-" + std::to_string(i);
      Utterance utt = tokenize(testsupport::random_text(rng, 1, 12), id);
      corpus.utterances.emplace(id, utt);
      (coin(rng) == 0 ? train_pool : test_pool).push_back(id);
    }
    auto add_annotations = [&](const std::vector<std::string>& pool,
                               std::vector<AnnotationRecord>& out) {
      for (const std::string& id : pool) {
        int count = ann_count(rng);
        const Utterance& utt = corpus.utterances.at(id);
        for (int k = 0; k < count; ++k) {
          std::uniform_int_distribution<int> start(0, utt.token_count() - 1);
          int s = start(rng);
          std::uniform_int_distribution<int> end(s, utt.token_count() - 1);
          AnnotationRecord ann;
          ann.utterance_id = id;
          ann.span = WordSpan{s, end(rng)};
          ann.category = kCategories[category(rng)];
          if (coin(rng) == 0) ann.intent = "Container";
          out.push_back(ann);
        }
      }
    };
    add_annotations(train_pool, corpus.training);
    add_annotations(test_pool, corpus.test);

    std::ostringstream saved;
    save_corpus(corpus, saved);
    std::istringstream reload(saved.str());
    Corpus loaded = load_corpus(reload);
    CHECK(loaded == corpus);
  }
}

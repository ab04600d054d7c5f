#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <cctype>
#include <random>

#include "doctest.h"
#include "gesturegen/errors.hpp"
#include "gesturegen/textproc.hpp"
#include "support.hpp"

using namespace gesturegen;

namespace {

// Brute-force whitespace split, kept independent of tokenize().
std::vector<std::string> oracle_split_ws(const std::string& text) {
  std::vector<std::string> out;
  std::string current;
  for (char c : text) {
    if (std::isspace(static_cast<unsigned char>(c))) {
      if (!current.empty()) out.push_back(current);
      current.clear();
    } else {
      current += c;
    }
  }
  if (!current.empty()) out.push_back(current);
  return out;
}

// Brute-force scan for sentence terminators followed by whitespace/end.
int oracle_terminator_count(const std::string& text) {
  int count = 0;
  for (size_t i = 0; i < text.size(); ++i) {
    char c = text[i];
    bool terminator = c == '.' || c == '!' || c == '?';
    bool boundary = i + 1 == text.size() ||
                    std::isspace(static_cast<unsigned char>(text[i + 1]));
    if (terminator && boundary) ++count;
  }
  return count;
}

}  // namespace

TEST_CASE("tokenize basics") {
  Utterance utt = tokenize("into a trust fund");
  REQUIRE(utt.token_count() == 4);
  CHECK(utt.tokens[0].text == "into");
  CHECK(utt.tokens[3].text == "fund");
  CHECK(utt.mark_names == std::vector<std::string>{"T0", "T1", "T2", "T3"});
  CHECK(utt.text == "into a trust fund");

  Utterance empty = tokenize("");
  CHECK(empty.token_count() == 0);
  CHECK(empty.mark_names.empty());

  Utterance punct = tokenize("Our values have not changed.");
  REQUIRE(punct.token_count() == 5);
  CHECK(punct.tokens[4].text == "changed.");
}

TEST_CASE("tokenize keeps punctuation attached (whitespace-split oracle)") {
  std::mt19937 rng(7001);
  for (int round = 0; round < 200; ++round) {
    std::string text = testsupport::random_text(rng, 0, 30);
    std::vector<std::string> expected = oracle_split_ws(text);
    Utterance utt = tokenize(text);
    REQUIRE(utt.token_count() == static_cast<int>(expected.size()));
    for (size_t i = 0; i < expected.size(); ++i) {
      CHECK(utt.tokens[i].text == expected[i]);
    }
    // Joining tokens with single spaces reproduces the normalized text.
    std::string joined;
    for (const Token& tok : utt.tokens) {
      if (!joined.empty()) joined += ' ';
      joined += tok.text;
    }
    CHECK(joined == utt.text);
    // Offsets point at the token within the normalized text.
    for (const Token& tok : utt.tokens) {
      CHECK(utt.text.substr(static_cast<size_t>(tok.offset), tok.text.size()) ==
            tok.text);
    }
  }
}

TEST_CASE("split_utterances examples") {
  CHECK(split_utterances("Hello there.").size() == 1);

  std::vector<Utterance> two = split_utterances("We won. We kept going!");
  REQUIRE(two.size() == 2);
  CHECK(two[0].text == "We won.");
  CHECK(two[1].text == "We kept going!");
  CHECK(two[0].id == "u0");
  CHECK(two[1].id == "u1");

  std::string flat = "no terminator at all";
  REQUIRE(oracle_terminator_count(flat) == 0);
  std::vector<Utterance> one = split_utterances(flat);
  REQUIRE(one.size() == 1);
  CHECK(one[0].text == flat);
}

TEST_CASE("split_utterances edge cases") {
  CHECK(split_utterances("").empty());
  CHECK(split_utterances("  \t \n").empty());
  // Terminator mid-token does not split.
  CHECK(split_utterances("see fig.3 for details").size() == 1);
  // Double terminators stay with their utterance.
  std::vector<Utterance> shout = split_utterances("We won!! We did.");
  REQUIRE(shout.size() == 2);
  CHECK(shout[0].text == "We won!!");
}

TEST_CASE("split_utterances covers the input (coverage property)") {
  std::mt19937 rng(7002);
  for (int round = 0; round < 200; ++round) {
    std::string text = testsupport::random_text(rng, 0, 40);
    std::vector<Utterance> utts = split_utterances(text);
    std::string joined;
    for (const Utterance& utt : utts) {
      if (!joined.empty()) joined += ' ';
      joined += utt.text;
    }
    CHECK(joined == tokenize(text).text);
  }
}

TEST_CASE("insert_marks examples") {
  CHECK(insert_marks(tokenize("Hi")) ==
        "<mark name=\"T0\"/>Hi <mark name=\"T1\"/>");
  CHECK(insert_marks(tokenize("")) == "");

  std::string marked = insert_marks(tokenize("into a trust fund"));
  std::vector<std::string> names = scan_mark_names(marked);
  REQUIRE(names.size() == 5);
  for (int i = 0; i < 5; ++i) {
    CHECK(names[static_cast<size_t>(i)] == "T" + std::to_string(i));
  }
}

TEST_CASE("insert_marks escapes XML-reserved characters") {
  std::string marked = insert_marks(tokenize("profits & <growth>"));
  CHECK(marked.find("profits") != std::string::npos);
  CHECK(marked.find("&amp;") != std::string::npos);
  CHECK(marked.find("&lt;growth&gt;") != std::string::npos);
  CHECK(scan_mark_names(marked).size() == 4);
}

TEST_CASE("insert_marks emits n+1 marks in order (property)") {
  std::mt19937 rng(7003);
  for (int round = 0; round < 300; ++round) {
    Utterance utt = tokenize(testsupport::random_text(rng, 0, 60));
    std::string marked = insert_marks(utt);
    std::vector<std::string> names = scan_mark_names(marked);
    if (utt.token_count() == 0) {
      CHECK(names.empty());
      continue;
    }
    REQUIRE(names.size() == static_cast<size_t>(utt.token_count()) + 1);
    for (size_t i = 0; i < names.size(); ++i) {
      CHECK(names[i] == "T" + std::to_string(i));
    }
  }
}

TEST_CASE("locate_phrase examples") {
  Utterance utt = tokenize("into a trust fund");
  auto span = locate_phrase(utt, "a trust fund");
  REQUIRE(span.has_value());
  CHECK(*span == WordSpan{1, 3});

  Utterance punct = tokenize("Our values have not changed.");
  auto norm = locate_phrase(punct, "values have not changed");
  REQUIRE(norm.has_value());
  CHECK(*norm == WordSpan{1, 4});

  CHECK_FALSE(locate_phrase(utt, "entirely absent words").has_value());
  CHECK_FALSE(locate_phrase(utt, "").has_value());
}

TEST_CASE("locate_phrase prefers exact over normalized and is leftmost") {
  // "Fund" appears normalized at 0 but exact at 3.
  Utterance utt = tokenize("fund the new fund Fund today");
  auto exact = locate_phrase(utt, "Fund");
  REQUIRE(exact.has_value());
  CHECK(exact->start == 4);

  auto leftmost = locate_phrase(utt, "fund");
  REQUIRE(leftmost.has_value());
  CHECK(leftmost->start == 0);
}

TEST_CASE("locate_phrase result re-normalizes to the phrase (property)") {
  std::mt19937 rng(7004);
  int successes = 0;
  for (int round = 0; round < 300; ++round) {
    Utterance utt = tokenize(testsupport::random_text(rng, 1, 20));
    // Pick a real token run and perturb its casing/punctuation.
    std::uniform_int_distribution<int> start_dist(0, utt.token_count() - 1);
    int start = start_dist(rng);
    std::uniform_int_distribution<int> len_dist(1, utt.token_count() - start);
    int len = len_dist(rng);
    WordSpan target{start, start + len - 1};
    std::string phrase;
    for (int i = target.start; i <= target.end; ++i) {
      std::string word = utt.tokens[static_cast<size_t>(i)].text;
      for (char& c : word) {
        c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
      }
      while (!word.empty() &&
             std::ispunct(static_cast<unsigned char>(word.back()))) {
        word.pop_back();
      }
      if (word.empty()) word = utt.tokens[static_cast<size_t>(i)].text;
      if (!phrase.empty()) phrase += ' ';
      phrase += word;
    }
    auto found = locate_phrase(utt, phrase);
    if (!found) continue;  // phrase may have collapsed to punctuation-only
    ++successes;
    // Normalized token sequences must agree.
    Utterance phrase_tokens = tokenize(phrase);
    REQUIRE(found->length() == phrase_tokens.token_count());
    for (int i = 0; i < found->length(); ++i) {
      CHECK(normalize_token(utt.tokens[static_cast<size_t>(found->start + i)].text) ==
            normalize_token(phrase_tokens.tokens[static_cast<size_t>(i)].text));
    }
  }
  CHECK(successes > 200);
}

TEST_CASE("normalize_token strips edges and folds case") {
  CHECK(normalize_token("Changed.") == "changed");
  CHECK(normalize_token("--") == "");
  CHECK(normalize_token("\xE2\x80\x9Cquoted\xE2\x80\x9D") == "quoted");
  CHECK(normalize_token("it\xE2\x80\x99s") == "it\xE2\x80\x99s");
  CHECK(normalize_token("(SEIU-1199),") == "seiu-1199");
}

TEST_CASE("scan_mark_names rejects malformed marks") {
  CHECK_THROWS_AS(scan_mark_names("<mark name=T0/>"), ParseError);
  CHECK_THROWS_AS(scan_mark_names("<mark name=\"T0\">"), ParseError);
  CHECK(scan_mark_names("no marks at all").empty());
}

#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace gesturegen {

// Inclusive range of token indices within one utterance.
struct WordSpan {
  int start = 0;
  int end = 0;

  bool operator==(const WordSpan&) const = default;

  int length() const { return end - start + 1; }

  bool overlaps(const WordSpan& other) const {
    return start <= other.end && other.start <= end;
  }

  bool contains(const WordSpan& other) const {
    return start <= other.start && other.end <= end;
  }
};

struct Token {
  std::string text;
  int offset = 0;  // character offset into the normalized utterance text

  bool operator==(const Token&) const = default;
};

// A tokenized sentence. A token is a maximal non-whitespace run, so
// punctuation stays attached to its word and token indices match the
// "word number" a reader would count. mark_names runs parallel to tokens
// as "T0".."T{n-1}"; the trailing boundary mark "T{n}" exists only in
// marked-up fragments, not here.
struct Utterance {
  std::string id;
  std::string text;  // whitespace-normalized; equals tokens joined by ' '
  std::vector<Token> tokens;
  std::vector<std::string> mark_names;

  bool operator==(const Utterance&) const = default;

  int token_count() const { return static_cast<int>(tokens.size()); }

  bool valid_span(const WordSpan& s) const {
    return 0 <= s.start && s.start <= s.end && s.end < token_count();
  }

  // Tokens in the span joined by single spaces.
  std::string phrase_text(const WordSpan& s) const;
};

Utterance tokenize(std::string_view text, std::string id = "u0");

// Splits at sentence-final . ! ? followed by whitespace or end of input.
// Terminators stay with their utterance; empty segments are dropped.
// No abbreviation handling. Utterances are assigned ids "u0".."u{k}".
std::vector<Utterance> split_utterances(std::string_view text);

// XML fragment where every token i is preceded by <mark name="Ti"/> and a
// final boundary mark T{n} follows the last word so its duration is known.
std::string insert_marks(const Utterance& utt);

// Leftmost token run whose tokens match the phrase. Exact token equality
// is tried over the whole utterance first; only if no exact run exists is
// the normalized comparison (case-folded, edge punctuation stripped) used.
std::optional<WordSpan> locate_phrase(const Utterance& utt, std::string_view phrase);

// Lowercases ASCII letters and strips punctuation (including common UTF-8
// quotes and dashes) from both ends of a token.
std::string normalize_token(std::string_view token);

std::string xml_escape_text(std::string_view raw);
std::string xml_escape_attr(std::string_view raw);

// Mark names in order of appearance in a marked-up fragment.
// Throws ParseError on a malformed mark element.
std::vector<std::string> scan_mark_names(std::string_view fragment);

}  // namespace gesturegen

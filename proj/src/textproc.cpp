#include "gesturegen/textproc.hpp"

#include <array>
#include <cctype>

#include "gesturegen/errors.hpp"

namespace gesturegen {

namespace {

bool is_space(char c) {
  return std::isspace(static_cast<unsigned char>(c)) != 0;
}

bool is_terminator(char c) { return c == '.' || c == '!' || c == '?'; }

std::vector<std::string> whitespace_split(std::string_view text) {
  std::vector<std::string> out;
  size_t i = 0;
  while (i < text.size()) {
    while (i < text.size() && is_space(text[i])) ++i;
    size_t begin = i;
    while (i < text.size() && !is_space(text[i])) ++i;
    if (i > begin) out.emplace_back(text.substr(begin, i - begin));
  }
  return out;
}

// UTF-8 punctuation that shows up in transcripts: curly quotes, dashes,
// the ellipsis. Stripped from token edges alongside ASCII punctuation.
constexpr std::array<std::string_view, 7> kUtf8Punct = {
    "\xE2\x80\x9C",  // left double quote
    "\xE2\x80\x9D",  // right double quote
    "\xE2\x80\x98",  // left single quote
    "\xE2\x80\x99",  // right single quote
    "\xE2\x80\x93",  // en dash
    "\xE2\x80\x94",  // em dash
    "\xE2\x80\xA6",  // ellipsis
};

// Length of the punctuation unit starting at position i, or 0.
size_t punct_prefix_len(std::string_view s, size_t i) {
  unsigned char c = static_cast<unsigned char>(s[i]);
  if (c < 0x80) {
    return std::ispunct(c) ? 1 : 0;
  }
  for (std::string_view seq : kUtf8Punct) {
    if (s.substr(i, seq.size()) == seq) return seq.size();
  }
  return 0;
}

// Length of the punctuation unit ending at position end-1, or 0.
size_t punct_suffix_len(std::string_view s, size_t end) {
  unsigned char c = static_cast<unsigned char>(s[end - 1]);
  if (c < 0x80) {
    return std::ispunct(c) ? 1 : 0;
  }
  for (std::string_view seq : kUtf8Punct) {
    if (end >= seq.size() && s.substr(end - seq.size(), seq.size()) == seq) {
      return seq.size();
    }
  }
  return 0;
}

}  // namespace

std::string Utterance::phrase_text(const WordSpan& s) const {
  std::string out;
  for (int i = s.start; i <= s.end && i < token_count(); ++i) {
    if (!out.empty()) out += ' ';
    out += tokens[static_cast<size_t>(i)].text;
  }
  return out;
}

Utterance tokenize(std::string_view text, std::string id) {
  Utterance utt;
  utt.id = std::move(id);
  int offset = 0;
  for (std::string& word : whitespace_split(text)) {
    if (!utt.text.empty()) {
      utt.text += ' ';
      ++offset;
    }
    utt.tokens.push_back(Token{word, offset});
    utt.mark_names.push_back("T" + std::to_string(utt.tokens.size() - 1));
    offset += static_cast<int>(word.size());
    utt.text += word;
  }
  return utt;
}

std::vector<Utterance> split_utterances(std::string_view text) {
  std::vector<Utterance> out;
  size_t begin = 0;
  auto flush = [&](size_t end) {
    std::string_view segment = text.substr(begin, end - begin);
    Utterance utt = tokenize(segment, "u" + std::to_string(out.size()));
    if (utt.token_count() > 0) out.push_back(std::move(utt));
    begin = end;
  };
  for (size_t i = 0; i < text.size(); ++i) {
    if (is_terminator(text[i]) &&
        (i + 1 == text.size() || is_space(text[i + 1]))) {
      flush(i + 1);
    }
  }
  flush(text.size());
  return out;
}

std::string insert_marks(const Utterance& utt) {
  if (utt.tokens.empty()) return "";
  std::string out;
  for (size_t i = 0; i < utt.tokens.size(); ++i) {
    out += "<mark name=\"T" + std::to_string(i) + "\"/>";
    out += xml_escape_text(utt.tokens[i].text);
    out += ' ';
  }
  out += "<mark name=\"T" + std::to_string(utt.tokens.size()) + "\"/>";
  return out;
}

std::string normalize_token(std::string_view token) {
  size_t begin = 0;
  size_t end = token.size();
  for (;;) {
    if (begin < end) {
      if (size_t n = punct_prefix_len(token, begin); n > 0) {
        begin += n;
        continue;
      }
    }
    if (begin < end) {
      if (size_t n = punct_suffix_len(token, end); n > 0) {
        end -= n;
        continue;
      }
    }
    break;
  }
  std::string out;
  out.reserve(end - begin);
  for (size_t i = begin; i < end; ++i) {
    out += static_cast<char>(std::tolower(static_cast<unsigned char>(token[i])));
  }
  return out;
}

std::optional<WordSpan> locate_phrase(const Utterance& utt, std::string_view phrase) {
  std::vector<std::string> want = whitespace_split(phrase);
  if (want.empty()) return std::nullopt;
  const int n = utt.token_count();
  const int m = static_cast<int>(want.size());
  if (m > n) return std::nullopt;

  auto scan = [&](auto&& matches) -> std::optional<WordSpan> {
    for (int start = 0; start + m <= n; ++start) {
      bool ok = true;
      for (int j = 0; j < m; ++j) {
        if (!matches(utt.tokens[static_cast<size_t>(start + j)].text, want[static_cast<size_t>(j)])) {
          ok = false;
          break;
        }
      }
      if (ok) return WordSpan{start, start + m - 1};
    }
    return std::nullopt;
  };

  if (auto exact = scan([](const std::string& a, const std::string& b) { return a == b; })) {
    return exact;
  }
  return scan([](const std::string& a, const std::string& b) {
    return normalize_token(a) == normalize_token(b);
  });
}

std::string xml_escape_text(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string xml_escape_attr(std::string_view raw) {
  std::string out;
  out.reserve(raw.size());
  for (char c : raw) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::vector<std::string> scan_mark_names(std::string_view fragment) {
  std::vector<std::string> names;
  size_t pos = 0;
  while ((pos = fragment.find("<mark", pos)) != std::string_view::npos) {
    size_t i = pos + 5;
    while (i < fragment.size() && is_space(fragment[i])) ++i;
    if (fragment.substr(i, 5) != "name=") {
      throw ParseError("malformed mark element: expected name attribute");
    }
    i += 5;
    if (i >= fragment.size() || (fragment[i] != '"' && fragment[i] != '\'')) {
      throw ParseError("malformed mark element: name value not quoted");
    }
    char quote = fragment[i++];
    size_t value_begin = i;
    while (i < fragment.size() && fragment[i] != quote) ++i;
    if (i >= fragment.size()) {
      throw ParseError("malformed mark element: unterminated name value");
    }
    names.emplace_back(fragment.substr(value_begin, i - value_begin));
    ++i;
    while (i < fragment.size() && is_space(fragment[i])) ++i;
    if (fragment.substr(i, 2) != "/>") {
      throw ParseError("malformed mark element: expected self-closing tag");
    }
    pos = i + 2;
  }
  return names;
}

}  // namespace gesturegen

#include "gesturegen/bml.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <set>

#include "gesturegen/errors.hpp"

namespace gesturegen {

int stroke_index(const std::string& mark_name) {
  if (mark_name.size() < 2 || mark_name[0] != 'T') {
    throw ParseError("invalid mark name: '" + mark_name + "'");
  }
  int value = 0;
  for (size_t i = 1; i < mark_name.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(mark_name[i]))) {
      throw ParseError("invalid mark name: '" + mark_name + "'");
    }
    value = value * 10 + (mark_name[i] - '0');
  }
  return value;
}

BmlDocument build_bml(const Utterance& utt,
                      const std::vector<GestureProposal>& proposals,
                      const GestureLexicon& lexicon) {
  BmlDocument doc;
  doc.utterance_id = utt.id;
  doc.speech_fragment = insert_marks(utt);
  for (size_t i = 0; i < proposals.size(); ++i) {
    const GestureProposal& p = proposals[i];
    if (!utt.valid_span(p.span)) {
      throw ValidationError("proposal span [" + std::to_string(p.span.start) +
                            "," + std::to_string(p.span.end) +
                            "] invalid for utterance '" + utt.id + "'");
    }
    ResolvedLexeme lex = lexicon.resolve(p.intent);
    doc.gestures.push_back(GestureBehavior{
        "T" + std::to_string(p.span.start), lex.lexeme, lex.bml_type,
        lex.emotion, static_cast<int>(i)});
  }
  std::stable_sort(doc.gestures.begin(), doc.gestures.end(),
                   [](const GestureBehavior& a, const GestureBehavior& b) {
                     int ia = stroke_index(a.stroke_start);
                     int ib = stroke_index(b.stroke_start);
                     if (ia != ib) return ia < ib;
                     return a.priority < b.priority;
                   });
  return doc;
}

std::string serialize(const BmlDocument& doc) {
  std::string out = "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n<bml>\n";
  if (doc.speech_fragment.empty()) {
    out += "  <speech id=\"" + xml_escape_attr(doc.utterance_id) + "\"/>\n";
  } else {
    out += "  <speech id=\"" + xml_escape_attr(doc.utterance_id) + "\">\n    ";
    out += doc.speech_fragment;
    out += "\n  </speech>\n";
  }
  for (size_t i = 0; i < doc.gestures.size(); ++i) {
    const GestureBehavior& g = doc.gestures[i];
    out += "  <gesture stroke-start=\"" + xml_escape_attr(g.stroke_start) +
           "\" lexeme=\"" + xml_escape_attr(g.lexeme) + "\" type=\"" +
           xml_escape_attr(g.bml_type) + "\" emotion=\"" +
           xml_escape_attr(g.emotion) + "\" id=\"g" + std::to_string(i) +
           "\" priority=\"" + std::to_string(g.priority) + "\" />\n";
  }
  out += "</bml>\n";
  return out;
}

namespace {

// Minimal reader for the BML dialect this pipeline emits: a <bml> root,
// one <speech> block whose content is kept verbatim, and self-closing
// <gesture> behaviors. Anything else is rejected.
class BmlReader {
 public:
  explicit BmlReader(const std::string& text) : text_(text) {}

  BmlDocument read() {
    skip_ws();
    if (peek_starts("<?xml")) skip_declaration();
    expect_open_tag("bml");
    BmlDocument doc;
    bool saw_speech = false;
    for (;;) {
      skip_ws();
      if (peek_starts("</bml>")) {
        pos_ += 6;
        break;
      }
      if (pos_ >= text_.size()) throw ParseError("unexpected end of BML input");
      std::string name = peek_element_name();
      if (name == "speech") {
        if (saw_speech) throw ParseError("multiple speech blocks");
        saw_speech = true;
        read_speech(doc);
      } else if (name == "gesture") {
        doc.gestures.push_back(read_gesture());
      } else {
        throw ParseError("unsupported behavior '" + name + "'");
      }
    }
    skip_ws();
    if (pos_ != text_.size()) throw ParseError("trailing content after </bml>");
    if (!saw_speech) throw ParseError("missing speech block");
    validate(doc);
    return doc;
  }

 private:
  void skip_ws() {
    while (pos_ < text_.size() &&
           std::isspace(static_cast<unsigned char>(text_[pos_]))) {
      ++pos_;
    }
  }

  bool peek_starts(std::string_view prefix) const {
    return text_.compare(pos_, prefix.size(), prefix) == 0;
  }

  void skip_declaration() {
    size_t end = text_.find("?>", pos_);
    if (end == std::string::npos) throw ParseError("unterminated XML declaration");
    pos_ = end + 2;
  }

  std::string peek_element_name() {
    if (pos_ >= text_.size() || text_[pos_] != '<') {
      throw ParseError("expected element");
    }
    size_t i = pos_ + 1;
    size_t begin = i;
    while (i < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[i])) ||
                                text_[i] == '-' || text_[i] == '_')) {
      ++i;
    }
    if (i == begin) throw ParseError("expected element name after '<'");
    return text_.substr(begin, i - begin);
  }

  void expect_open_tag(std::string_view name) {
    skip_ws();
    if (peek_element_name() != name) {
      throw ParseError("expected <" + std::string(name) + "> element");
    }
    pos_ += 1 + name.size();
    read_attributes();  // tolerated and ignored on the root
    skip_ws();
    if (pos_ >= text_.size() || text_[pos_] != '>') {
      throw ParseError("expected '>' closing <" + std::string(name) + ">");
    }
    ++pos_;
  }

  std::map<std::string, std::string> read_attributes() {
    std::map<std::string, std::string> attrs;
    for (;;) {
      skip_ws();
      if (pos_ >= text_.size()) throw ParseError("unexpected end inside tag");
      char c = text_[pos_];
      if (c == '>' || c == '/') return attrs;
      size_t begin = pos_;
      while (pos_ < text_.size() && text_[pos_] != '=' &&
             !std::isspace(static_cast<unsigned char>(text_[pos_]))) {
        ++pos_;
      }
      std::string name = text_.substr(begin, pos_ - begin);
      skip_ws();
      if (pos_ >= text_.size() || text_[pos_] != '=') {
        throw ParseError("attribute '" + name + "' missing value");
      }
      ++pos_;
      skip_ws();
      if (pos_ >= text_.size() || (text_[pos_] != '"' && text_[pos_] != '\'')) {
        throw ParseError("attribute '" + name + "' value not quoted");
      }
      char quote = text_[pos_++];
      size_t vbegin = pos_;
      while (pos_ < text_.size() && text_[pos_] != quote) ++pos_;
      if (pos_ >= text_.size()) {
        throw ParseError("unterminated value for attribute '" + name + "'");
      }
      attrs[name] = unescape(text_.substr(vbegin, pos_ - vbegin));
      ++pos_;
    }
  }

  void read_speech(BmlDocument& doc) {
    pos_ += 1 + 6;  // "<speech"
    auto attrs = read_attributes();
    if (auto it = attrs.find("id"); it != attrs.end()) doc.utterance_id = it->second;
    skip_ws();
    if (peek_starts("/>")) {
      pos_ += 2;
      doc.speech_fragment.clear();
      return;
    }
    if (pos_ >= text_.size() || text_[pos_] != '>') {
      throw ParseError("expected '>' closing <speech>");
    }
    ++pos_;
    size_t end = text_.find("</speech>", pos_);
    if (end == std::string::npos) throw ParseError("unterminated speech block");
    doc.speech_fragment = trim(text_.substr(pos_, end - pos_));
    pos_ = end + 9;
  }

  GestureBehavior read_gesture() {
    pos_ += 1 + 7;  // "<gesture"
    auto attrs = read_attributes();
    skip_ws();
    if (!peek_starts("/>")) {
      throw ParseError("gesture element must be self-closing");
    }
    pos_ += 2;
    GestureBehavior g;
    auto required = [&](const char* name) -> std::string {
      auto it = attrs.find(name);
      if (it == attrs.end()) {
        throw ParseError(std::string("gesture missing attribute '") + name + "'");
      }
      return it->second;
    };
    g.stroke_start = required("stroke-start");
    g.lexeme = required("lexeme");
    g.bml_type = required("type");
    g.emotion = required("emotion");
    if (auto it = attrs.find("priority"); it != attrs.end()) {
      try {
        g.priority = std::stoi(it->second);
      } catch (const std::exception&) {
        throw ParseError("gesture priority is not an integer: '" + it->second + "'");
      }
    }
    return g;
  }

  void validate(const BmlDocument& doc) {
    std::set<std::string> marks;
    for (const std::string& name : scan_mark_names(doc.speech_fragment)) {
      marks.insert(name);
    }
    int prev = -1;
    for (const GestureBehavior& g : doc.gestures) {
      int idx = stroke_index(g.stroke_start);  // also enforces T[0-9]+
      if (marks.count(g.stroke_start) == 0) {
        throw ReferentialError("gesture stroke-start references missing mark '" +
                               g.stroke_start + "'");
      }
      if (idx < prev) {
        throw ParseError("gestures not ordered by stroke index (at '" +
                         g.stroke_start + "')");
      }
      prev = idx;
    }
  }

  static std::string trim(std::string s) {
    size_t begin = s.find_first_not_of(" \t\r\n");
    if (begin == std::string::npos) return "";
    size_t end = s.find_last_not_of(" \t\r\n");
    return s.substr(begin, end - begin + 1);
  }

  static std::string unescape(std::string s) {
    std::string out;
    out.reserve(s.size());
    for (size_t i = 0; i < s.size();) {
      if (s[i] == '&') {
        if (s.compare(i, 5, "&amp;") == 0) { out += '&'; i += 5; continue; }
        if (s.compare(i, 4, "&lt;") == 0) { out += '<'; i += 4; continue; }
        if (s.compare(i, 4, "&gt;") == 0) { out += '>'; i += 4; continue; }
        if (s.compare(i, 6, "&quot;") == 0) { out += '"'; i += 6; continue; }
        if (s.compare(i, 6, "&apos;") == 0) { out += '\''; i += 6; continue; }
      }
      out += s[i++];
    }
    return out;
  }

  const std::string& text_;
  size_t pos_ = 0;
};

}  // namespace

BmlDocument parse(const std::string& xml) {
  return BmlReader(xml).read();
}

}  // namespace gesturegen

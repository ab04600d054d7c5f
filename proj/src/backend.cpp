#include "gesturegen/backend.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <vector>

#include "gesturegen/errors.hpp"
#include "gesturegen/textproc.hpp"
#include "httplib.h"
#include "json.hpp"

namespace gesturegen {

namespace {

using nlohmann::json;

bool contains_ci(const std::string& haystack, std::string_view needle) {
  auto it = std::search(haystack.begin(), haystack.end(), needle.begin(), needle.end(),
                        [](char a, char b) {
                          return std::tolower(static_cast<unsigned char>(a)) ==
                                 std::tolower(static_cast<unsigned char>(b));
                        });
  return it != haystack.end();
}

struct MockRule {
  const char* intent;
  const char* description;
  const char* schema;
  const char* begins;
  const char* ends;
  std::vector<const char*> triggers;
};

const std::vector<MockRule>& mock_rules() {
  static const std::vector<MockRule> kRules = {
      {"Progress", "Both hands roll forward in a continuing motion.", "PATH",
       "Center", "Right",
       {"progress", "forward", "advance", "advancing", "advancement", "ahead",
        "momentum"}},
      {"Regress", "Hand sweeps back toward the shoulder.", "PATH", "Right",
       "Center",
       {"backward", "backwards", "regress", "regressing", "retreat",
        "rollback"}},
      {"Cycle", "Index finger traces a repeating circle.", "CYCLE", "Center",
       "Center",
       {"cycle", "cycles", "loop", "repeat", "repeating", "recurring"}},
      {"Collect", "Open hands draw inward and meet at the chest.", "PATH",
       "Left and Right", "Center",
       {"together", "gather", "gathering", "collect", "collecting", "unite",
        "united", "combine"}},
      {"Container", "Hands shape an open box in front of the torso.",
       "CONTAINER", "Center", "Center",
       {"into", "fund", "inside", "within", "contains", "boundary", "box"}},
      {"Oscillation", "Flat hand rocks side to side.", "BALANCE", "Left",
       "Right",
       {"balance", "uncertain", "uncertainty", "wavering", "indecision",
        "unstable"}},
      {"Temporal", "Hand marks points left to right along a line.", "PATH",
       "Left", "Right",
       {"future", "past", "present", "timeline", "tomorrow", "yesterday",
        "decades", "years"}},
  };
  return kRules;
}

struct MockMatch {
  const MockRule* rule;
  std::string phrase;
};

// Leftmost trigger scan; each match claims a short window of tokens so the
// associated phrase reads naturally, and scanning resumes after it.
std::vector<MockMatch> match_rules(const Utterance& utt) {
  std::vector<MockMatch> matches;
  int i = 0;
  while (i < utt.token_count()) {
    std::string norm = normalize_token(utt.tokens[static_cast<size_t>(i)].text);
    const MockRule* hit = nullptr;
    for (const MockRule& rule : mock_rules()) {
      for (const char* trigger : rule.triggers) {
        if (norm == trigger) {
          hit = &rule;
          break;
        }
      }
      if (hit) break;
    }
    if (hit == nullptr) {
      ++i;
      continue;
    }
    int end = std::min(i + 3, utt.token_count() - 1);
    matches.push_back({hit, utt.phrase_text(WordSpan{i, end})});
    i = end + 1;
  }
  return matches;
}

// First clause boundary: a token ending in , ; : or a lone dash token.
// Returns -1 when the utterance has no usable boundary.
int clause_boundary(const Utterance& utt) {
  for (int i = 0; i + 1 < utt.token_count(); ++i) {
    const std::string& tok = utt.tokens[static_cast<size_t>(i)].text;
    char last = tok.back();
    if (last == ',' || last == ';' || last == ':') return i;
    if (tok == "--" || tok == "-" || tok == "\xE2\x80\x94" || tok == "\xE2\x80\x93") {
      return i;
    }
  }
  return -1;
}

std::string mock_rheme_theme(const Utterance& utt) {
  json out;
  int b = clause_boundary(utt);
  if (b < 0) {
    out["theme"] = nullptr;
    out["rheme"] = utt.text;
  } else {
    out["theme"] = utt.phrase_text(WordSpan{0, b});
    out["rheme"] = utt.phrase_text(WordSpan{b + 1, utt.token_count() - 1});
  }
  return out.dump();
}

std::string mock_spatial(const Utterance& utt) {
  std::vector<MockMatch> matches = match_rules(utt);
  if (matches.empty()) return "No image schemas found.";
  std::string out;
  std::vector<const char*> schema_order;
  for (const MockMatch& m : matches) {
    if (std::find_if(schema_order.begin(), schema_order.end(), [&](const char* s) {
          return std::string_view(s) == m.rule->schema;
        }) == schema_order.end()) {
      schema_order.push_back(m.rule->schema);
    }
  }
  for (const char* schema : schema_order) {
    out += std::string("[Type of Image Schema: ") + schema + "]\n";
    for (const MockMatch& m : matches) {
      if (std::string_view(m.rule->schema) != schema) continue;
      out += "[\"" + m.phrase + "\" : " + m.rule->description +
             " : Spatially Begins:" + m.rule->begins +
             " : Spatially Ends:" + m.rule->ends + "]\n";
    }
  }
  return out;
}

std::string mock_selection(const Utterance& utt, bool with_description) {
  json proposals = json::array();
  for (const MockMatch& m : match_rules(utt)) {
    json rec = {{"intent", m.rule->intent}, {"phrase", m.phrase}};
    if (with_description) rec["description"] = m.rule->description;
    proposals.push_back(rec);
  }
  return proposals.dump();
}

}  // namespace

std::string extract_utterance_from_prompt(const std::string& prompt) {
  size_t pos = prompt.rfind(kUtteranceMarker);
  if (pos == std::string::npos) return "";
  std::string rest = prompt.substr(pos + std::string_view(kUtteranceMarker).size());
  size_t begin = rest.find_first_not_of(" \t\r\n");
  if (begin == std::string::npos) return "";
  size_t end = rest.find_last_not_of(" \t\r\n");
  rest = rest.substr(begin, end - begin + 1);
  if (rest.size() >= 2 && rest.front() == '"' && rest.back() == '"') {
    rest = rest.substr(1, rest.size() - 2);
  }
  return rest;
}

std::string MockBackend::complete(const std::string& prompt,
                                  const CompletionParams&) {
  Utterance utt = tokenize(extract_utterance_from_prompt(prompt));
  if (contains_ci(prompt, "rheme")) return mock_rheme_theme(utt);
  if (contains_ci(prompt, "spatially begins")) return mock_spatial(utt);
  return mock_selection(utt, contains_ci(prompt, "\"description\""));
}

HttpBackend::HttpBackend(HttpBackendConfig config) : config_(std::move(config)) {
  if (config_.endpoint.empty()) {
    throw ConfigError("remote backend requires an endpoint");
  }
}

std::string HttpBackend::complete(const std::string& prompt,
                                  const CompletionParams& params) {
  httplib::Client client(config_.endpoint);
  auto timeout = std::chrono::duration<double>(config_.timeout_seconds);
  client.set_connection_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
  client.set_read_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));
  client.set_write_timeout(std::chrono::duration_cast<std::chrono::milliseconds>(timeout));

  json body = {
      {"model", config_.model},
      {"messages", json::array({json{{"role", "user"}, {"content", prompt}}})},
      {"temperature", params.temperature},
      {"max_tokens", params.max_tokens},
      {"frequency_penalty", params.frequency_penalty},
  };
  httplib::Headers headers;
  if (!config_.api_key.empty()) {
    headers.emplace("Authorization", "Bearer " + config_.api_key);
  }
  httplib::Result res =
      client.Post(config_.path, headers, body.dump(), "application/json");
  if (!res) {
    throw BackendUnavailable("backend unreachable at " + config_.endpoint +
                             ": " + httplib::to_string(res.error()));
  }
  if (res->status < 200 || res->status >= 300) {
    throw BackendUnavailable("backend returned HTTP " +
                             std::to_string(res->status) + ": " + res->body);
  }
  json reply = json::parse(res->body, nullptr, false);
  if (reply.is_discarded() || !reply.contains("choices") ||
      !reply["choices"].is_array() || reply["choices"].empty()) {
    throw BackendUnavailable("backend response is not a chat completion");
  }
  const json& first = reply["choices"][0];
  if (!first.contains("message") || !first["message"].contains("content") ||
      !first["message"]["content"].is_string()) {
    throw BackendUnavailable("backend response has no message content");
  }
  return first["message"]["content"].get<std::string>();
}

}  // namespace gesturegen

#pragma once

#include <memory>
#include <string>

namespace gesturegen {

struct CompletionParams {
  double temperature = 0.2;
  int max_tokens = 256;
  double frequency_penalty = 0.0;
};

// One request/response pair with the wall-clock latency of the exchange.
struct BackendExchange {
  std::string prompt;
  std::string raw_response;
  double latency_seconds = 0.0;
  std::string model_id;
};

// Completion provider. Implementations: HttpBackend (remote chat
// completion) and MockBackend (deterministic keyword rules, no network).
class Backend {
 public:
  virtual ~Backend() = default;
  virtual std::string complete(const std::string& prompt,
                               const CompletionParams& params) = 0;
  virtual std::string model_id() const = 0;
};

// Pure function of (prompt, params): identical inputs yield identical
// output bytes. Understands the three prompt shapes the pipeline sends
// (gesture selection, rheme/theme analysis, spatial image-schema query)
// and answers from keyword rules over the embedded utterance.
class MockBackend : public Backend {
 public:
  std::string complete(const std::string& prompt,
                       const CompletionParams& params) override;
  std::string model_id() const override { return "mock-rules-v1"; }
};

struct HttpBackendConfig {
  std::string endpoint;  // scheme://host[:port]
  std::string path = "/v1/chat/completions";
  std::string model = "gpt-4";
  std::string api_key;  // usually from GESTURE_LLM_API_KEY
  double timeout_seconds = 30.0;
};

// Chat-completion client. Sends {model, messages, temperature, max_tokens,
// frequency_penalty} and returns choices[0].message.content. Network or
// HTTP failures throw BackendUnavailable.
class HttpBackend : public Backend {
 public:
  explicit HttpBackend(HttpBackendConfig config);
  std::string complete(const std::string& prompt,
                       const CompletionParams& params) override;
  std::string model_id() const override { return config_.model; }

 private:
  HttpBackendConfig config_;
};

// Marker the prompt templates place before the target utterance; the mock
// backend uses it to recover the utterance text from a prompt.
inline constexpr const char* kUtteranceMarker = "Here is the utterance:";

// Utterance text embedded in a prompt, or "" when the marker is absent.
std::string extract_utterance_from_prompt(const std::string& prompt);

}  // namespace gesturegen

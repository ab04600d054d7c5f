#pragma once

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gesturegen/backend.hpp"
#include "gesturegen/bml.hpp"
#include "gesturegen/discourse.hpp"
#include "gesturegen/lexicon.hpp"
#include "gesturegen/prompts.hpp"
#include "gesturegen/scheduler.hpp"
#include "gesturegen/selector.hpp"

namespace gesturegen {

// End-to-end settings, loadable from a JSON config file. Flags override
// file values; the API key always comes from GESTURE_LLM_API_KEY.
struct PipelineConfig {
  std::string backend_kind = "mock";  // "mock" or "remote"
  HttpBackendConfig remote;
  int parallelism = 4;

  PromptConfig prompt;
  std::string corpus_path;
  std::string prompts_dir;  // empty: built-in templates
  std::string fallback_lexeme = "GenericMetaphoric";

  double seconds_per_word = 0.3;
  double prep_lead = 0.25;
  double min_duration = 1.0;
  int alignment_tolerance = 2;

  static PipelineConfig from_file(const std::string& path);
  static PipelineConfig from_json_text(const std::string& text);
  void validate() const;  // throws ConfigError
};

// One utterance's trip through selection and rheme prioritization.
struct UtteranceResult {
  Utterance utterance;
  std::vector<GestureProposal> proposals;  // prioritized order
  std::optional<RhemeTheme> rheme_theme;
  std::vector<BackendExchange> exchanges;
  std::vector<std::string> warnings;
  std::optional<std::string> error;  // set when the utterance wholly failed
  double latency_seconds = 0.0;      // final selection exchange
};

struct BmlResult {
  UtteranceResult selection;
  BmlDocument document;
  std::string xml;
  std::optional<Timeline> timeline;
};

// Shared pipeline behind the CLI and the HTTP service, so both produce
// byte-identical BML for identical inputs. Stateless across calls apart
// from the configured backend; utterances are processed concurrently up
// to config.parallelism with results kept in input order.
class Pipeline {
 public:
  explicit Pipeline(PipelineConfig config,
                    std::shared_ptr<Backend> backend = nullptr);

  const PipelineConfig& config() const { return config_; }
  Backend& backend() { return *backend_; }
  const GestureLexicon& lexicon() const { return lexicon_; }
  const PromptLibrary& prompts() const { return prompts_; }
  const Corpus* corpus() const { return corpus_ ? &*corpus_ : nullptr; }

  // Splits text into utterances, selects gestures for each, analyzes
  // rheme/theme and prioritizes. Per-utterance failures land in
  // UtteranceResult::error.
  std::vector<UtteranceResult> select(const std::string& text);

  // Full pipeline through BML serialization. When timings is non-null it
  // applies to the (single) utterance and a resolved timeline is included;
  // with several utterances a timing map is rejected since mark names
  // would collide.
  std::vector<BmlResult> to_bml(const std::string& text,
                                const WordTiming* timings = nullptr);

 private:
  UtteranceResult run_one(const Utterance& utt);

  PipelineConfig config_;
  GestureLexicon lexicon_;
  PromptLibrary prompts_;
  std::optional<Corpus> corpus_;
  std::shared_ptr<Backend> backend_;
};

std::shared_ptr<Backend> make_backend(const PipelineConfig& config);

// Reads GESTURE_LLM_API_KEY; empty when unset.
std::string api_key_from_env();

// Wire rendering shared by the CLI and the HTTP service.
std::string selection_results_to_json(const std::vector<UtteranceResult>& results);
std::string proposal_to_json_text(const GestureProposal& proposal);

}  // namespace gesturegen

#include "gesturegen/pipeline.hpp"

#include <chrono>
#include <cstdlib>
#include <fstream>
#include <future>
#include <semaphore>
#include <sstream>

#include "gesturegen/errors.hpp"
#include "json.hpp"

namespace gesturegen {

namespace {

using nlohmann::json;

template <typename T>
void read_if(const json& obj, const char* key, T& target) {
  if (obj.contains(key) && !obj[key].is_null()) {
    target = obj[key].get<T>();
  }
}

}  // namespace

std::string api_key_from_env() {
  const char* key = std::getenv("GESTURE_LLM_API_KEY");
  return key ? key : "";
}

PipelineConfig PipelineConfig::from_json_text(const std::string& text) {
  json doc = json::parse(text, nullptr, false);
  if (doc.is_discarded() || !doc.is_object()) {
    throw ConfigError("config is not a JSON object");
  }
  PipelineConfig config;
  read_if(doc, "backend", config.backend_kind);
  read_if(doc, "parallelism", config.parallelism);
  read_if(doc, "corpus_path", config.corpus_path);
  read_if(doc, "prompts_dir", config.prompts_dir);
  read_if(doc, "fallback_lexeme", config.fallback_lexeme);
  read_if(doc, "seconds_per_word", config.seconds_per_word);
  read_if(doc, "prep_lead", config.prep_lead);
  read_if(doc, "min_duration", config.min_duration);
  read_if(doc, "alignment_tolerance", config.alignment_tolerance);
  if (doc.contains("remote") && doc["remote"].is_object()) {
    const json& remote = doc["remote"];
    read_if(remote, "endpoint", config.remote.endpoint);
    read_if(remote, "path", config.remote.path);
    read_if(remote, "model", config.remote.model);
    read_if(remote, "timeout_seconds", config.remote.timeout_seconds);
  }
  if (doc.contains("prompt") && doc["prompt"].is_object()) {
    const json& prompt = doc["prompt"];
    read_if(prompt, "approach", config.prompt.approach);
    read_if(prompt, "temperature", config.prompt.temperature);
    read_if(prompt, "max_tokens", config.prompt.max_tokens);
    read_if(prompt, "frequency_penalty", config.prompt.frequency_penalty);
    read_if(prompt, "truncated", config.prompt.truncated);
    read_if(prompt, "retries", config.prompt.retries);
  }
  config.remote.api_key = api_key_from_env();
  config.validate();
  return config;
}

PipelineConfig PipelineConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file: " + path);
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return from_json_text(buffer.str());
}

void PipelineConfig::validate() const {
  if (backend_kind != "mock" && backend_kind != "remote") {
    throw ConfigError("backend must be 'mock' or 'remote', got '" + backend_kind + "'");
  }
  if (prompt.approach < 0 || prompt.approach > 3) {
    throw ConfigError("prompt.approach must be 0..3");
  }
  if (parallelism < 1) throw ConfigError("parallelism must be >= 1");
  if (seconds_per_word <= 0.0) throw ConfigError("seconds_per_word must be positive");
  if (prep_lead < 0.0) throw ConfigError("prep_lead must be non-negative");
  if (min_duration <= 0.0) throw ConfigError("min_duration must be positive");
  if (alignment_tolerance < 0) throw ConfigError("alignment_tolerance must be >= 0");
  if (prompt.retries < 0) throw ConfigError("prompt.retries must be >= 0");
  if (backend_kind == "remote" && remote.endpoint.empty()) {
    throw ConfigError("remote backend requires remote.endpoint");
  }
}

std::shared_ptr<Backend> make_backend(const PipelineConfig& config) {
  if (config.backend_kind == "mock") return std::make_shared<MockBackend>();
  HttpBackendConfig remote = config.remote;
  if (remote.api_key.empty()) remote.api_key = api_key_from_env();
  return std::make_shared<HttpBackend>(remote);
}

Pipeline::Pipeline(PipelineConfig config, std::shared_ptr<Backend> backend)
    : config_(std::move(config)),
      lexicon_(GestureLexicon::builtin()),
      prompts_(config_.prompts_dir.empty()
                   ? PromptLibrary::builtin()
                   : PromptLibrary::load_dir(config_.prompts_dir)),
      backend_(backend ? std::move(backend) : make_backend(config_)) {
  config_.validate();
  lexicon_.set_fallback_lexeme(config_.fallback_lexeme);
  if (!config_.corpus_path.empty()) {
    corpus_ = load_corpus_file(config_.corpus_path);
  } else if (config_.prompt.approach == 2 || config_.prompt.approach == 3) {
    throw ConfigError("approach " + std::to_string(config_.prompt.approach) +
                      " requires corpus_path for training examples");
  }
}

UtteranceResult Pipeline::run_one(const Utterance& utt) {
  UtteranceResult result;
  result.utterance = utt;
  try {
    SelectionResult sel = select_gestures(utt, config_.prompt, *backend_,
                                          lexicon_, corpus(), prompts_);
    result.exchanges = std::move(sel.exchanges);
    result.warnings = std::move(sel.warnings);
    if (!result.exchanges.empty()) {
      result.latency_seconds = result.exchanges.back().latency_seconds;
    }
    result.proposals = std::move(sel.proposals);
    if (utt.token_count() > 0 && !result.proposals.empty()) {
      try {
        RhemeTheme rt = analyze_rheme_theme(utt, *backend_, prompts_);
        result.rheme_theme = rt;
        result.proposals = prioritize(std::move(result.proposals), rt);
      } catch (const DiscourseFailure& e) {
        // Selection worked; keep the proposals unprioritized.
        result.warnings.push_back(e.what());
      }
    }
  } catch (const SelectionFailure& e) {
    result.error = e.what();
  }
  return result;
}

std::vector<UtteranceResult> Pipeline::select(const std::string& text) {
  std::vector<Utterance> utterances = split_utterances(text);
  std::vector<UtteranceResult> results(utterances.size());
  if (utterances.empty()) return results;

  std::counting_semaphore<> slots(config_.parallelism);
  std::vector<std::future<void>> tasks;
  tasks.reserve(utterances.size());
  for (size_t i = 0; i < utterances.size(); ++i) {
    tasks.push_back(std::async(std::launch::async, [&, i] {
      slots.acquire();
      results[i] = run_one(utterances[i]);
      slots.release();
    }));
  }
  for (std::future<void>& task : tasks) task.get();
  return results;
}

namespace {

json proposal_to_json(const GestureProposal& p) {
  json rec = {{"intent", p.intent},
              {"phrase", p.phrase},
              {"span", {p.span.start, p.span.end}},
              {"rheme_aligned", p.rheme_aligned}};
  if (p.physical_description) rec["description"] = *p.physical_description;
  if (p.image_schema) rec["image_schema"] = *p.image_schema;
  if (p.spatial_begin) rec["spatial_begin"] = to_string(*p.spatial_begin);
  if (p.spatial_end) rec["spatial_end"] = to_string(*p.spatial_end);
  return rec;
}

}  // namespace

std::string proposal_to_json_text(const GestureProposal& proposal) {
  return proposal_to_json(proposal).dump();
}

std::string selection_results_to_json(const std::vector<UtteranceResult>& results) {
  json out = json::array();
  for (const UtteranceResult& r : results) {
    json entry = {{"utterance_id", r.utterance.id},
                  {"text", r.utterance.text},
                  {"latency_seconds", r.latency_seconds}};
    entry["proposals"] = json::array();
    for (size_t i = 0; i < r.proposals.size(); ++i) {
      json rec = proposal_to_json(r.proposals[i]);
      rec["priority"] = static_cast<int>(i);
      entry["proposals"].push_back(std::move(rec));
    }
    if (r.rheme_theme) {
      json rt;
      rt["rheme"] = {r.rheme_theme->rheme_span.start, r.rheme_theme->rheme_span.end};
      if (r.rheme_theme->theme_span) {
        rt["theme"] = {r.rheme_theme->theme_span->start, r.rheme_theme->theme_span->end};
      } else {
        rt["theme"] = nullptr;
      }
      entry["rheme_theme"] = std::move(rt);
    }
    if (!r.warnings.empty()) entry["warnings"] = r.warnings;
    if (r.error) entry["error"] = *r.error;
    out.push_back(std::move(entry));
  }
  return out.dump(2);
}

std::vector<BmlResult> Pipeline::to_bml(const std::string& text,
                                        const WordTiming* timings) {
  std::vector<UtteranceResult> selections = select(text);
  if (timings != nullptr && selections.size() > 1) {
    throw ConfigError("a timing file applies to a single utterance; got " +
                      std::to_string(selections.size()));
  }
  std::vector<BmlResult> results;
  results.reserve(selections.size());
  for (UtteranceResult& sel : selections) {
    BmlResult out;
    out.document = build_bml(sel.utterance, sel.proposals, lexicon_);
    out.xml = serialize(out.document);
    if (timings != nullptr) {
      out.timeline = resolve_schedule(out.document, *timings, config_.prep_lead,
                                      config_.min_duration);
    }
    out.selection = std::move(sel);
    results.push_back(std::move(out));
  }
  return results;
}

}  // namespace gesturegen

#include "gesturegen/service.hpp"

#include <chrono>
#include <sstream>
#include <thread>

#include "gesturegen/errors.hpp"
#include "httplib.h"
#include "json.hpp"

namespace gesturegen {

namespace {

using nlohmann::json;

double elapsed_seconds(std::chrono::steady_clock::time_point begin) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - begin)
      .count();
}

void reply_json(httplib::Response& res, int status, const json& body) {
  res.status = status;
  res.set_content(body.dump(2), "application/json");
}

void reply_error(httplib::Response& res, int status, const std::string& detail) {
  reply_json(res, status, json{{"error", detail}});
}

// Body must be a JSON object with a non-empty string "text".
std::optional<json> parse_body(const httplib::Request& req, httplib::Response& res) {
  json body = json::parse(req.body, nullptr, false);
  if (body.is_discarded() || !body.is_object()) {
    reply_error(res, 400, "request body must be a JSON object");
    return std::nullopt;
  }
  if (!body.contains("text") || !body["text"].is_string()) {
    reply_error(res, 400, "request body needs a string field \"text\"");
    return std::nullopt;
  }
  return body;
}

}  // namespace

struct Service::Impl {
  Pipeline pipeline;
  httplib::Server server;
  std::thread worker;

  explicit Impl(PipelineConfig config, std::shared_ptr<Backend> backend)
      : pipeline(std::move(config), std::move(backend)) {
    wire();
  }

  void wire() {
    server.Get("/v1/health", [this](const httplib::Request&, httplib::Response& res) {
      reply_json(res, 200,
                 json{{"status", "ok"},
                      {"backend", pipeline.config().backend_kind},
                      {"model", pipeline.backend().model_id()}});
    });

    server.Post("/v1/select", [this](const httplib::Request& req, httplib::Response& res) {
      auto begin = std::chrono::steady_clock::now();
      std::optional<json> body = parse_body(req, res);
      if (!body) return;
      try {
        std::vector<UtteranceResult> results =
            pipeline.select((*body)["text"].get<std::string>());
        json out = {{"utterances", json::parse(selection_results_to_json(results))},
                    {"latency_seconds", elapsed_seconds(begin)}};
        reply_json(res, 200, out);
      } catch (const BackendUnavailable& e) {
        reply_error(res, 502, e.what());
      } catch (const Error& e) {
        reply_error(res, 500, e.what());
      }
    });

    server.Post("/v1/bml", [this](const httplib::Request& req, httplib::Response& res) {
      auto begin = std::chrono::steady_clock::now();
      std::optional<json> body = parse_body(req, res);
      if (!body) return;
      try {
        std::optional<WordTiming> timings;
        if (body->contains("timings") && !(*body)["timings"].is_null()) {
          if (!(*body)["timings"].is_object()) {
            reply_error(res, 400, "\"timings\" must be an object of mark -> seconds");
            return;
          }
          std::istringstream stream((*body)["timings"].dump());
          timings = load_timing_file(stream);
        }
        std::vector<BmlResult> results = pipeline.to_bml(
            (*body)["text"].get<std::string>(), timings ? &*timings : nullptr);
        json docs = json::array();
        for (const BmlResult& r : results) {
          json doc = {{"utterance_id", r.document.utterance_id}, {"bml", r.xml}};
          if (r.selection.error) doc["error"] = *r.selection.error;
          if (r.timeline) {
            std::ostringstream lines;
            write_timeline_jsonl(*r.timeline, lines);
            doc["timeline_jsonl"] = lines.str();
          }
          docs.push_back(std::move(doc));
        }
        reply_json(res, 200,
                   json{{"documents", std::move(docs)},
                        {"latency_seconds", elapsed_seconds(begin)}});
      } catch (const BackendUnavailable& e) {
        reply_error(res, 502, e.what());
      } catch (const ParseError& e) {
        reply_error(res, 400, e.what());
      } catch (const ConfigError& e) {
        reply_error(res, 400, e.what());
      } catch (const Error& e) {
        reply_error(res, 500, e.what());
      }
    });
  }
};

Service::Service(PipelineConfig config, std::shared_ptr<Backend> backend)
    : impl_(std::make_unique<Impl>(std::move(config), std::move(backend))) {}

Service::~Service() { stop(); }

void Service::run(const std::string& host, int port) {
  if (!impl_->server.bind_to_port(host, port)) {
    throw ConfigError("cannot bind " + host + ":" + std::to_string(port));
  }
  impl_->server.listen_after_bind();
}

int Service::start_background(const std::string& host) {
  int port = impl_->server.bind_to_any_port(host);
  if (port <= 0) throw ConfigError("cannot bind a port on " + host);
  impl_->worker = std::thread([this] { impl_->server.listen_after_bind(); });
  impl_->server.wait_until_ready();
  return port;
}

void Service::stop() {
  if (!impl_) return;
  impl_->server.stop();
  if (impl_->worker.joinable()) impl_->worker.join();
}

}  // namespace gesturegen

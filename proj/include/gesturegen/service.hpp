#pragma once

#include <memory>
#include <string>

#include "gesturegen/pipeline.hpp"

namespace gesturegen {

// HTTP front end over the shared pipeline.
//   POST /v1/select {"text": ...}              -> proposals per utterance
//   POST /v1/bml    {"text": ..., "timings"?}  -> BML (+timeline)
//   GET  /v1/health                            -> {"status","backend","model"}
// Every response carries "latency_seconds" for the whole request. The
// service keeps no per-request state; no request affects another.
class Service {
 public:
  explicit Service(PipelineConfig config,
                   std::shared_ptr<Backend> backend = nullptr);
  ~Service();

  Service(const Service&) = delete;
  Service& operator=(const Service&) = delete;

  // Binds and serves until stop(); blocks. Throws ConfigError when the
  // port cannot be bound.
  void run(const std::string& host, int port);

  // Binds to an OS-assigned free port and serves on a background thread.
  // Returns the bound port. Used by tests and callers embedding the
  // service.
  int start_background(const std::string& host);

  void stop();

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
};

}  // namespace gesturegen

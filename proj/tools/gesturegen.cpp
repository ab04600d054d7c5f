#include <algorithm>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "gesturegen/errors.hpp"
#include "gesturegen/evalharness.hpp"
#include "gesturegen/pipeline.hpp"
#include "gesturegen/service.hpp"

namespace {

using namespace gesturegen;

constexpr int kExitOk = 0;
constexpr int kExitError = 1;    // config / parse / usage problems
constexpr int kExitBackend = 2;  // backend unreachable or utterances failed

struct CommonArgs {
  std::string config_path;
  std::string backend;  // "", "mock", "remote"
  int approach = -1;
  int tolerance = -1;
  std::string corpus_path;
  bool truncated = false;
};

void add_common_flags(CLI::App* cmd, CommonArgs& args) {
  cmd->add_option("--config", args.config_path, "JSON config file");
  cmd->add_option("--backend", args.backend, "Backend kind: mock or remote")
      ->check(CLI::IsMember({"mock", "remote"}));
  cmd->add_option("--approach", args.approach, "Prompting approach 0..3")
      ->check(CLI::Range(0, 3));
  cmd->add_option("--tolerance", args.tolerance,
                  "Alignment tolerance in tokens");
  cmd->add_option("--corpus", args.corpus_path, "Corpus JSONL file");
  cmd->add_flag("--truncated", args.truncated,
                "Ask only for intent and phrase (lower latency)");
}

PipelineConfig resolve_config(const CommonArgs& args) {
  PipelineConfig config;
  if (!args.config_path.empty()) {
    config = PipelineConfig::from_file(args.config_path);
  }
  if (!args.backend.empty()) config.backend_kind = args.backend;
  if (args.approach >= 0) config.prompt.approach = args.approach;
  if (args.tolerance >= 0) config.alignment_tolerance = args.tolerance;
  if (!args.corpus_path.empty()) config.corpus_path = args.corpus_path;
  if (args.truncated) config.prompt.truncated = true;
  config.validate();
  return config;
}

std::string read_text(const std::string& positional) {
  if (!positional.empty()) return positional;
  std::ostringstream buffer;
  buffer << std::cin.rdbuf();
  return buffer.str();
}

int run_select(const CommonArgs& common, const std::string& text_arg) {
  Pipeline pipeline(resolve_config(common));
  std::vector<UtteranceResult> results = pipeline.select(read_text(text_arg));
  std::cout << selection_results_to_json(results) << '\n';
  for (const UtteranceResult& r : results) {
    if (r.error) {
      std::cerr << "error: utterance '" << r.utterance.id << "': " << *r.error << '\n';
    }
  }
  bool any_failed = std::any_of(results.begin(), results.end(),
                                [](const UtteranceResult& r) { return r.error.has_value(); });
  return any_failed ? kExitBackend : kExitOk;
}

int run_bml(const CommonArgs& common, const std::string& text_arg,
            const std::string& timings_path, const std::string& out_dir) {
  Pipeline pipeline(resolve_config(common));
  std::optional<WordTiming> timings;
  if (!timings_path.empty()) {
    std::ifstream in(timings_path);
    if (!in) throw ConfigError("cannot open timing file: " + timings_path);
    timings = load_timing_file(in);
  }
  std::vector<BmlResult> results =
      pipeline.to_bml(read_text(text_arg), timings ? &*timings : nullptr);
  bool any_failed = false;
  for (const BmlResult& r : results) {
    if (r.selection.error) {
      any_failed = true;
      std::cerr << "error: utterance '" << r.selection.utterance.id
                << "': " << *r.selection.error << '\n';
    }
    if (out_dir.empty()) {
      std::cout << r.xml;
      if (r.timeline) write_timeline_jsonl(*r.timeline, std::cout);
    } else {
      std::string base = out_dir + "/" + r.document.utterance_id;
      std::ofstream xml_out(base + ".bml", std::ios::binary);
      if (!xml_out) throw ConfigError("cannot write " + base + ".bml");
      xml_out << r.xml;
      if (r.timeline) {
        std::ofstream tl_out(base + ".timeline.jsonl", std::ios::binary);
        write_timeline_jsonl(*r.timeline, tl_out);
      }
    }
  }
  return any_failed ? kExitBackend : kExitOk;
}

int run_eval(const CommonArgs& common, const std::string& labels_path,
             const std::string& approaches_arg, const std::string& out_path,
             bool table) {
  PipelineConfig config = resolve_config(common);
  if (config.corpus_path.empty()) {
    throw ConfigError("eval requires --corpus (or corpus_path in the config)");
  }
  Corpus corpus = load_corpus_file(config.corpus_path);

  std::vector<int> approaches;
  if (approaches_arg.empty()) {
    approaches = {0, 1, 2, 3};
  } else {
    std::istringstream stream(approaches_arg);
    std::string item;
    while (std::getline(stream, item, ',')) {
      int a = std::stoi(item);
      if (a < 0 || a > 3) throw ConfigError("approach out of range: " + item);
      approaches.push_back(a);
    }
  }
  std::vector<PromptConfig> configs;
  for (int a : approaches) {
    PromptConfig pc = config.prompt;
    pc.approach = a;
    configs.push_back(pc);
  }

  std::vector<LabelRecord> labels;
  bool have_labels = false;
  if (!labels_path.empty()) {
    labels = load_labels_file(labels_path);
    have_labels = true;
  } else {
    std::cerr << "warning: no label file; category 1/2 tallies omitted\n";
  }

  std::shared_ptr<Backend> backend = make_backend(config);
  EvalReport report =
      compare_approaches(corpus, configs, *backend, have_labels ? &labels : nullptr,
                         config.alignment_tolerance);
  std::string rendered = report_to_json(report);
  if (out_path.empty()) {
    std::cout << rendered << '\n';
  } else {
    std::ofstream out(out_path, std::ios::binary);
    if (!out) throw ConfigError("cannot write report: " + out_path);
    out << rendered << '\n';
  }
  if (table) std::cout << report_to_table(report);
  return kExitOk;
}

int run_serve(const CommonArgs& common, const std::string& host, int port) {
  Service service(resolve_config(common));
  std::cerr << "listening on " << host << ":" << port << '\n';
  service.run(host, port);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Gesture selection pipeline: utterance text in, gesture "
               "proposals, BML schedules and evaluation reports out"};
  app.require_subcommand(1);

  CommonArgs common;
  std::string text_arg;
  std::string timings_path;
  std::string out_dir;
  std::string labels_path;
  std::string approaches_arg;
  std::string out_path;
  bool table = false;
  std::string host = "127.0.0.1";
  int port = 8710;

  CLI::App* select_cmd =
      app.add_subcommand("select", "Propose gestures for utterances");
  add_common_flags(select_cmd, common);
  select_cmd->add_option("text", text_arg, "Input text (stdin when omitted)");

  CLI::App* bml_cmd = app.add_subcommand("bml", "Emit BML documents");
  add_common_flags(bml_cmd, common);
  bml_cmd->add_option("text", text_arg, "Input text (stdin when omitted)");
  bml_cmd->add_option("--timings", timings_path,
                      "JSON timing file; also emits the resolved timeline");
  bml_cmd->add_option("--out", out_dir, "Write <utterance>.bml files here");

  CLI::App* eval_cmd =
      app.add_subcommand("eval", "Compare prompting approaches on the corpus");
  add_common_flags(eval_cmd, common);
  eval_cmd->add_option("--labels", labels_path, "Expert label JSONL file");
  eval_cmd->add_option("--approaches", approaches_arg,
                       "Comma-separated subset, e.g. 1,3 (default all)");
  eval_cmd->add_option("--report", out_path, "Write the JSON report here");
  eval_cmd->add_flag("--table", table, "Also print a plain-text table");

  CLI::App* serve_cmd = app.add_subcommand("serve", "Run the HTTP service");
  add_common_flags(serve_cmd, common);
  serve_cmd->add_option("--host", host, "Bind address");
  serve_cmd->add_option("--port", port, "Port");

  CLI11_PARSE(app, argc, argv);

  try {
    if (select_cmd->parsed()) return run_select(common, text_arg);
    if (bml_cmd->parsed()) return run_bml(common, text_arg, timings_path, out_dir);
    if (eval_cmd->parsed()) {
      return run_eval(common, labels_path, approaches_arg, out_path, table);
    }
    if (serve_cmd->parsed()) return run_serve(common, host, port);
  } catch (const BackendUnavailable& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitBackend;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitError;
  }
  return kExitError;
}

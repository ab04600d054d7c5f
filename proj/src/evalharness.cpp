#include "gesturegen/evalharness.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <istream>
#include <sstream>

#include "gesturegen/errors.hpp"
#include "json.hpp"

namespace gesturegen {

namespace {

using nlohmann::json;

}  // namespace

std::string_view to_string(AppropriatenessLabel label) {
  switch (label) {
    case AppropriatenessLabel::Appropriate: return "appropriate";
    case AppropriatenessLabel::Inappropriate: return "inappropriate";
    case AppropriatenessLabel::NoCorrespondingGesture: return "no_corresponding_gesture";
  }
  return "appropriate";
}

AppropriatenessLabel parse_appropriateness_label(std::string_view text) {
  std::string folded;
  for (char c : text) {
    folded += static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  }
  if (folded == "appropriate") return AppropriatenessLabel::Appropriate;
  if (folded == "inappropriate") return AppropriatenessLabel::Inappropriate;
  if (folded == "no_corresponding_gesture" || folded == "no corresponding gesture") {
    return AppropriatenessLabel::NoCorrespondingGesture;
  }
  throw ParseError("unknown appropriateness label: '" + std::string(text) + "'");
}

AlignmentCounts count_outcomes(const std::vector<AlignmentOutcome>& outcomes) {
  AlignmentCounts counts;
  for (const AlignmentOutcome& o : outcomes) {
    switch (o.kind) {
      case AlignmentKind::Both: ++counts.both; break;
      case AlignmentKind::ModelOnly: ++counts.model_only; break;
      case AlignmentKind::SpeakerOnly: ++counts.speaker_only; break;
    }
  }
  return counts;
}

int span_gap(const WordSpan& a, const WordSpan& b) {
  if (a.overlaps(b)) return 0;
  return std::max(b.start - a.end, a.start - b.end);
}

std::vector<std::pair<int, int>> match_spans(const std::vector<WordSpan>& model,
                                             const std::vector<WordSpan>& speaker,
                                             int tolerance) {
  const int nm = static_cast<int>(model.size());
  const int ns = static_cast<int>(speaker.size());

  // Eligible partners per model span, nearest first.
  std::vector<std::vector<int>> prefs(static_cast<size_t>(nm));
  for (int i = 0; i < nm; ++i) {
    for (int j = 0; j < ns; ++j) {
      if (span_gap(model[static_cast<size_t>(i)], speaker[static_cast<size_t>(j)]) <= tolerance) {
        prefs[static_cast<size_t>(i)].push_back(j);
      }
    }
    std::sort(prefs[static_cast<size_t>(i)].begin(), prefs[static_cast<size_t>(i)].end(),
              [&](int a, int b) {
                int ga = span_gap(model[static_cast<size_t>(i)], speaker[static_cast<size_t>(a)]);
                int gb = span_gap(model[static_cast<size_t>(i)], speaker[static_cast<size_t>(b)]);
                if (ga != gb) return ga < gb;
                if (speaker[static_cast<size_t>(a)].start != speaker[static_cast<size_t>(b)].start) {
                  return speaker[static_cast<size_t>(a)].start < speaker[static_cast<size_t>(b)].start;
                }
                return a < b;
              });
  }

  // Augmenting-path matching: maximum cardinality with the nearest
  // eligible partner preferred whenever there is slack.
  std::vector<int> matched_model(static_cast<size_t>(ns), -1);
  std::function<bool(int, std::vector<bool>&)> augment = [&](int i, std::vector<bool>& visited) {
    for (int j : prefs[static_cast<size_t>(i)]) {
      if (visited[static_cast<size_t>(j)]) continue;
      visited[static_cast<size_t>(j)] = true;
      if (matched_model[static_cast<size_t>(j)] < 0 ||
          augment(matched_model[static_cast<size_t>(j)], visited)) {
        matched_model[static_cast<size_t>(j)] = i;
        return true;
      }
    }
    return false;
  };
  for (int i = 0; i < nm; ++i) {
    std::vector<bool> visited(static_cast<size_t>(ns), false);
    augment(i, visited);
  }

  std::vector<std::pair<int, int>> pairs;
  for (int j = 0; j < ns; ++j) {
    if (matched_model[static_cast<size_t>(j)] >= 0) {
      pairs.emplace_back(matched_model[static_cast<size_t>(j)], j);
    }
  }
  std::sort(pairs.begin(), pairs.end());
  return pairs;
}

std::vector<AlignmentOutcome> align(const std::vector<GestureProposal>& proposals,
                                    const std::vector<AnnotationRecord>& annotations,
                                    int tolerance) {
  std::string utterance_id;
  if (!annotations.empty()) utterance_id = annotations.front().utterance_id;

  std::vector<WordSpan> model;
  model.reserve(proposals.size());
  for (const GestureProposal& p : proposals) model.push_back(p.span);
  std::vector<WordSpan> speaker;
  speaker.reserve(annotations.size());
  for (const AnnotationRecord& a : annotations) speaker.push_back(a.span);

  std::vector<std::pair<int, int>> pairs = match_spans(model, speaker, tolerance);
  std::vector<bool> model_matched(model.size(), false);
  std::vector<bool> speaker_matched(speaker.size(), false);

  std::vector<AlignmentOutcome> outcomes;
  for (const auto& [i, j] : pairs) {
    model_matched[static_cast<size_t>(i)] = true;
    speaker_matched[static_cast<size_t>(j)] = true;
    outcomes.push_back(AlignmentOutcome{AlignmentKind::Both, utterance_id,
                                        model[static_cast<size_t>(i)],
                                        speaker[static_cast<size_t>(j)]});
  }
  for (size_t i = 0; i < model.size(); ++i) {
    if (!model_matched[i]) {
      outcomes.push_back(AlignmentOutcome{AlignmentKind::ModelOnly, utterance_id,
                                          model[i], std::nullopt});
    }
  }
  for (size_t j = 0; j < speaker.size(); ++j) {
    if (!speaker_matched[j]) {
      outcomes.push_back(AlignmentOutcome{AlignmentKind::SpeakerOnly, utterance_id,
                                          std::nullopt, speaker[j]});
    }
  }
  return outcomes;
}

Tallies tally(const std::vector<std::pair<int, AppropriatenessLabel>>& labels) {
  Tallies out;
  for (const auto& [category, label] : labels) {
    if (category != 1 && category != 2) {
      throw ValidationError("category must be 1 or 2, got " + std::to_string(category));
    }
    if (category == 2 && label == AppropriatenessLabel::NoCorrespondingGesture) {
      throw ValidationError(
          "no_corresponding_gesture is only valid in category 1");
    }
    CategoryTally& bucket = category == 1 ? out.category1 : out.category2;
    switch (label) {
      case AppropriatenessLabel::Appropriate: ++bucket.appropriate; break;
      case AppropriatenessLabel::Inappropriate: ++bucket.inappropriate; break;
      case AppropriatenessLabel::NoCorrespondingGesture: ++bucket.no_corresponding; break;
    }
  }
  return out;
}

LatencyStats latency_stats(const std::vector<double>& samples) {
  if (samples.empty()) {
    throw ValidationError("latency_stats requires at least one sample");
  }
  LatencyStats stats;
  stats.min_seconds = samples.front();
  stats.max_seconds = samples.front();
  double sum = 0.0;
  for (double s : samples) {
    stats.min_seconds = std::min(stats.min_seconds, s);
    stats.max_seconds = std::max(stats.max_seconds, s);
    sum += s;
  }
  stats.mean_seconds = sum / static_cast<double>(samples.size());
  return stats;
}

std::vector<LabelRecord> load_labels(std::istream& in) {
  std::vector<LabelRecord> records;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    json rec = json::parse(line, nullptr, false);
    if (rec.is_discarded() || !rec.is_object()) {
      throw ParseError("line " + std::to_string(line_no) + ": not a JSON object");
    }
    try {
      LabelRecord out;
      out.utterance_id = rec.at("utterance_id").get<std::string>();
      out.proposal_index = rec.at("proposal_index").get<int>();
      out.category = rec.at("category").get<int>();
      out.label = parse_appropriateness_label(rec.at("label").get<std::string>());
      if (rec.contains("approach") && !rec["approach"].is_null()) {
        out.approach = rec["approach"].get<int>();
      }
      records.push_back(std::move(out));
    } catch (const json::exception& e) {
      throw ParseError("line " + std::to_string(line_no) + ": " + e.what());
    }
  }
  return records;
}

std::vector<LabelRecord> load_labels_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open label file: " + path);
  return load_labels(in);
}

EvalReport compare_approaches(const Corpus& corpus,
                              const std::vector<PromptConfig>& configs,
                              Backend& backend,
                              const std::vector<LabelRecord>* labels,
                              int tolerance, const GestureLexicon& lexicon) {
  EvalReport report;
  const std::set<std::string> test_ids = corpus.test_ids();
  for (const PromptConfig& config : configs) {
    ApproachReport rep;
    std::vector<double> latencies;
    for (const std::string& id : test_ids) {
      const Utterance& utt = corpus.utterance(id);
      std::vector<AnnotationRecord> annotations;
      for (const AnnotationRecord& ann : corpus.test) {
        if (ann.utterance_id == id) annotations.push_back(ann);
      }
      try {
        SelectionResult sel = select_gestures(utt, config, backend, lexicon, &corpus);
        AlignmentCounts counts = count_outcomes(align(sel.proposals, annotations, tolerance));
        rep.alignment.both += counts.both;
        rep.alignment.model_only += counts.model_only;
        rep.alignment.speaker_only += counts.speaker_only;
        rep.proposals_total += static_cast<int>(sel.proposals.size());
        latencies.push_back(sel.final_exchange().latency_seconds);
        ++rep.utterances_evaluated;
      } catch (const Error& e) {
        rep.failures.push_back(id + ": " + e.what());
      }
    }
    if (!latencies.empty()) rep.latency = latency_stats(latencies);
    if (labels != nullptr) {
      std::vector<std::pair<int, AppropriatenessLabel>> relevant;
      for (const LabelRecord& rec : *labels) {
        if (!rec.approach || *rec.approach == config.approach) {
          relevant.emplace_back(rec.category, rec.label);
        }
      }
      rep.tallies = tally(relevant);
      rep.has_tallies = true;
    }
    report.approaches[config.approach] = std::move(rep);
  }
  return report;
}

namespace {

double round2(double value) { return std::round(value * 100.0) / 100.0; }

json tally_to_json(const CategoryTally& t, bool with_ncg) {
  json out = {{"appropriate", t.appropriate}, {"inappropriate", t.inappropriate}};
  if (with_ncg) out["no_corresponding_gesture"] = t.no_corresponding;
  return out;
}

}  // namespace

std::string report_to_json(const EvalReport& report) {
  json out;
  out["approaches"] = json::object();
  for (const auto& [approach, rep] : report.approaches) {
    json section;
    section["alignment"] = {{"both", rep.alignment.both},
                            {"model_only", rep.alignment.model_only},
                            {"speaker_only", rep.alignment.speaker_only}};
    if (rep.has_tallies) {
      section["category1"] = tally_to_json(rep.tallies.category1, true);
      section["category2"] = tally_to_json(rep.tallies.category2, false);
    }
    if (rep.latency) {
      section["latency_seconds"] = {{"min", rep.latency->min_seconds},
                                    {"max", rep.latency->max_seconds},
                                    {"mean", rep.latency->mean_seconds},
                                    {"mean_2dp", round2(rep.latency->mean_seconds)}};
    }
    section["utterances_evaluated"] = rep.utterances_evaluated;
    section["proposals_total"] = rep.proposals_total;
    section["failures"] = rep.failures;
    out["approaches"][std::to_string(approach)] = std::move(section);
  }
  out["warnings"] = report.warnings;
  return out.dump(2);
}

std::string report_to_table(const EvalReport& report) {
  std::ostringstream out;
  out << "approach  both  model_only  speaker_only  cat1(A/I/N)  cat2(A/I)  "
         "latency min/mean/max (s)\n";
  for (const auto& [approach, rep] : report.approaches) {
    out << approach << "         " << rep.alignment.both << "     "
        << rep.alignment.model_only << "           " << rep.alignment.speaker_only
        << "             ";
    if (rep.has_tallies) {
      out << rep.tallies.category1.appropriate << "/"
          << rep.tallies.category1.inappropriate << "/"
          << rep.tallies.category1.no_corresponding << "        "
          << rep.tallies.category2.appropriate << "/"
          << rep.tallies.category2.inappropriate << "      ";
    } else {
      out << "-            -          ";
    }
    if (rep.latency) {
      char buffer[64];
      std::snprintf(buffer, sizeof(buffer), "%.2f/%.2f/%.2f",
                    rep.latency->min_seconds, rep.latency->mean_seconds,
                    rep.latency->max_seconds);
      out << buffer;
    } else {
      out << "-";
    }
    out << '\n';
    for (const std::string& failure : rep.failures) {
      out << "  failed: " << failure << '\n';
    }
  }
  return out.str();
}

}  // namespace gesturegen

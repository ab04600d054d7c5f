#pragma once

#include <chrono>
#include <random>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "gesturegen/backend.hpp"

namespace testsupport {

// Replays a fixed list of responses in order; complains when the script
// runs dry. Counts calls so retry behavior is checkable.
class ScriptedBackend : public gesturegen::Backend {
 public:
  explicit ScriptedBackend(std::vector<std::string> responses)
      : responses_(std::move(responses)) {}

  std::string complete(const std::string&, const gesturegen::CompletionParams&) override {
    if (calls_ >= responses_.size()) {
      throw std::runtime_error("scripted backend exhausted after " +
                               std::to_string(calls_) + " calls");
    }
    return responses_[calls_++];
  }

  std::string model_id() const override { return "scripted"; }

  size_t calls() const { return calls_; }

 private:
  std::vector<std::string> responses_;
  size_t calls_ = 0;
};

// Wraps another backend and sleeps a scripted delay before each reply,
// cycling through the list. Used to exercise latency measurement.
class DelayBackend : public gesturegen::Backend {
 public:
  DelayBackend(gesturegen::Backend& inner, std::vector<int> delays_ms)
      : inner_(inner), delays_ms_(std::move(delays_ms)) {}

  std::string complete(const std::string& prompt,
                       const gesturegen::CompletionParams& params) override {
    int delay = delays_ms_[calls_++ % delays_ms_.size()];
    std::this_thread::sleep_for(std::chrono::milliseconds(delay));
    return inner_.complete(prompt, params);
  }

  std::string model_id() const override { return inner_.model_id(); }

 private:
  gesturegen::Backend& inner_;
  std::vector<int> delays_ms_;
  size_t calls_ = 0;
};

inline std::string random_word(std::mt19937& rng) {
  static const char* kSuffixes[] = {"", "", "", "", ",", ".", "!", "?", ";", "'s"};
  std::uniform_int_distribution<int> len_dist(1, 8);
  std::uniform_int_distribution<int> letter(0, 25);
  std::uniform_int_distribution<int> suffix(0, 9);
  std::uniform_int_distribution<int> upper(0, 4);
  std::string word;
  int len = len_dist(rng);
  for (int i = 0; i < len; ++i) {
    char c = static_cast<char>('a' + letter(rng));
    if (i == 0 && upper(rng) == 0) c = static_cast<char>(c - 'a' + 'A');
    word += c;
  }
  word += kSuffixes[suffix(rng)];
  return word;
}

inline std::string random_text(std::mt19937& rng, int min_tokens, int max_tokens) {
  std::uniform_int_distribution<int> count_dist(min_tokens, max_tokens);
  std::uniform_int_distribution<int> gap(0, 3);
  int count = count_dist(rng);
  std::string text;
  for (int i = 0; i < count; ++i) {
    if (i > 0) {
      text += ' ';
      if (gap(rng) == 0) text += ' ';   // occasional double space
      if (gap(rng) == 1) text += '\t';  // and stray tabs
    }
    text += random_word(rng);
  }
  return text;
}

}  // namespace testsupport

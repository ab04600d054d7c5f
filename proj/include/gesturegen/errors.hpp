#pragma once

#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace gesturegen {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Malformed input bytes: corpus lines, BML documents, fixture files.
struct ParseError : Error {
  using Error::Error;
};

// Structurally valid input referencing something that does not exist
// (an unknown utterance id, a stroke mark missing from the speech block).
struct ReferentialError : Error {
  using Error::Error;
};

struct ConfigError : Error {
  using Error::Error;
};

struct SchedulingError : Error {
  using Error::Error;
};

struct ValidationError : Error {
  using Error::Error;
};

// The remote backend could not be reached or answered with a failure.
struct BackendUnavailable : Error {
  using Error::Error;
};

// Retries exhausted while asking the backend for parseable proposals.
// Carries every raw response seen so callers can log or inspect them.
struct SelectionFailure : Error {
  SelectionFailure(const std::string& what, std::vector<std::string> responses)
      : Error(what), raw_responses(std::move(responses)) {}

  std::vector<std::string> raw_responses;
};

struct EmptyProposalSet : Error {
  using Error::Error;
};

struct DiscourseFailure : Error {
  using Error::Error;
};

}  // namespace gesturegen

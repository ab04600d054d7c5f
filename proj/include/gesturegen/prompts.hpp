#pragma once

#include <string>

namespace gesturegen {

// Prompt template fragments with named placeholders ({UTTERANCE},
// {INTENT_LIST}, {EXAMPLES}, ...). The built-in set is compiled in;
// load_dir overrides any fragment from a <name>.txt file so deployments
// can version prompts without rebuilding.
struct PromptLibrary {
  std::string selection;         // master selection template
  std::string intent_block;      // wraps {INTENT_LIST}; approaches 1 and 3
  std::string example_block;     // wraps {EXAMPLES}; approaches 2 and 3
  std::string task_free;         // approach 0 ask
  std::string task_intents;      // approaches 1..3 ask
  std::string output_full;       // intent + phrase + physical description
  std::string output_truncated;  // intent + phrase only
  std::string spatial;           // image-schema / spatial begins-ends query
  std::string rheme_theme;       // discourse analysis query

  static const PromptLibrary& builtin();
  static PromptLibrary load_dir(const std::string& dir);
  void save_dir(const std::string& dir) const;
};

// Replaces every occurrence of "{name}" in the template.
std::string fill_placeholder(std::string text, const std::string& name,
                             const std::string& value);

}  // namespace gesturegen

#include "gesturegen/prompts.hpp"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "gesturegen/errors.hpp"

namespace gesturegen {

namespace {

// The master selection template. {TASK}, {OUTPUT_SPEC}, {INTENT_BLOCK} and
// {EXAMPLE_BLOCK} are filled per approach, so any two approaches differ
// exactly by the blocks their factorial cell includes.
constexpr const char* kSelection =
    "You are selecting co-speech gestures for a virtual human giving a spoken "
    "presentation.\n"
    "{INTENT_BLOCK}{EXAMPLE_BLOCK}{TASK}\n"
    "{OUTPUT_SPEC}\n"
    "Here is the utterance:\n"
    "\"{UTTERANCE}\"\n";

constexpr const char* kIntentBlock =
    "\nThe speaker's repertoire of gestural intents is:\n"
    "{INTENT_LIST}\n";

constexpr const char* kExampleBlock =
    "\nAnnotated examples of the speaker's gestures:\n"
    "{EXAMPLES}\n";

constexpr const char* kTaskFree =
    "Suggest a gesture for the utterance below.";

constexpr const char* kTaskIntents =
    "Report each gestural intent evoked by the utterance below and suggest a "
    "gesture for it.";

constexpr const char* kOutputFull =
    "Answer with a JSON array of objects, one per gesture, with keys "
    "\"intent\" (the gestural intent, or a short name for the gesture), "
    "\"phrase\" (the exact words of the utterance the gesture accompanies) "
    "and \"description\" (the physical properties of the gesture). "
    "Return only JSON.";

constexpr const char* kOutputTruncated =
    "Answer with a JSON array of objects, one per gesture, with keys "
    "\"intent\" (the gestural intent, or a short name for the gesture) and "
    "\"phrase\" (the exact words of the utterance the gesture accompanies). "
    "Return only JSON.";

constexpr const char* kSpatial =
    "In the following utterance, please identify any Image Schemas evoked by "
    "the utterance, the Phrase of the utterance that comprise the image "
    "schema and what gesture might be used to illustrate that Phrase as well "
    "as where that gesture Spatially Begins and Spatially Ends, center, left "
    "or right.\n"
    "Please provide the answer in the following format:\n"
    "[Type of Image Schema:]\n"
    "\t[Phrase : Gesture : Spatially Begins: Spatially Ends]\n"
    "\t[Phrase : Gesture : Spatially Begins: Spatially Ends]\n"
    "Here is the utterance:\n"
    "\"{UTTERANCE}\"\n";

constexpr const char* kRhemeTheme =
    "Identify the theme and the rheme of the utterance below. The theme is "
    "the topic of the utterance; the rheme is what is being said about the "
    "topic, the new information.\n"
    "Answer with a JSON object with keys \"theme\" and \"rheme\", each "
    "holding the exact words of the corresponding part of the utterance. If "
    "the utterance has no theme, set \"theme\" to null. Return only JSON.\n"
    "Here is the utterance:\n"
    "\"{UTTERANCE}\"\n";

struct NamedFragment {
  const char* name;
  std::string PromptLibrary::* member;
};

constexpr NamedFragment kFragments[] = {
    {"selection", &PromptLibrary::selection},
    {"intent_block", &PromptLibrary::intent_block},
    {"example_block", &PromptLibrary::example_block},
    {"task_free", &PromptLibrary::task_free},
    {"task_intents", &PromptLibrary::task_intents},
    {"output_full", &PromptLibrary::output_full},
    {"output_truncated", &PromptLibrary::output_truncated},
    {"spatial", &PromptLibrary::spatial},
    {"rheme_theme", &PromptLibrary::rheme_theme},
};

}  // namespace

const PromptLibrary& PromptLibrary::builtin() {
  static const PromptLibrary lib = {
      kSelection,   kIntentBlock, kExampleBlock,    kTaskFree, kTaskIntents,
      kOutputFull,  kOutputTruncated, kSpatial,     kRhemeTheme,
  };
  return lib;
}

PromptLibrary PromptLibrary::load_dir(const std::string& dir) {
  PromptLibrary lib = builtin();
  for (const NamedFragment& frag : kFragments) {
    std::filesystem::path path = std::filesystem::path(dir) / (std::string(frag.name) + ".txt");
    std::ifstream in(path);
    if (!in) continue;  // absent fragments keep the built-in text
    std::ostringstream buffer;
    buffer << in.rdbuf();
    lib.*frag.member = buffer.str();
  }
  return lib;
}

void PromptLibrary::save_dir(const std::string& dir) const {
  std::filesystem::create_directories(dir);
  for (const NamedFragment& frag : kFragments) {
    std::filesystem::path path = std::filesystem::path(dir) / (std::string(frag.name) + ".txt");
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write prompt fragment: " + path.string());
    out << this->*frag.member;
  }
}

std::string fill_placeholder(std::string text, const std::string& name,
                             const std::string& value) {
  const std::string needle = "{" + name + "}";
  size_t pos = 0;
  while ((pos = text.find(needle, pos)) != std::string::npos) {
    text.replace(pos, needle.size(), value);
    pos += value.size();
  }
  return text;
}

}  // namespace gesturegen

#pragma once

#include <bit>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "hoikit/box.hpp"

namespace hoikit {

/// Canonical answer keys, spelled exactly "human", "object", "object class", "verb class".
enum class AnswerKey : std::uint8_t { human = 1, object = 2, object_class = 4, verb_class = 8 };

inline constexpr int kCanonicalKeyCount = 4;

/// Maps a raw key (lowercased and trimmed) to its canonical key.
std::optional<AnswerKey> canonical_key(std::string_view raw);
const char* key_name(AnswerKey key);

class KeySet {
 public:
  void insert(AnswerKey k) { bits_ |= static_cast<std::uint8_t>(k); }
  bool contains(AnswerKey k) const { return (bits_ & static_cast<std::uint8_t>(k)) != 0; }
  int size() const { return std::popcount(bits_); }
  bool operator==(const KeySet&) const = default;

 private:
  std::uint8_t bits_ = 0;
};

/// One answer entry as the model wrote it.
///
/// Duplicate keys keep the first occurrence's value; key_count counts every
/// key in the entry, duplicates and unknown keys included. A box whose value
/// is not an array of exactly 4 finite numbers is absent, but its key is
/// still present and counted.
struct HoiInstance {
  std::optional<BBox> human;
  std::optional<BBox> object;
  std::optional<std::string> object_class;
  std::vector<std::string> verb_classes;
  int key_count = 0;
  KeySet present_keys;
};

struct ParseDiagnostic {
  std::size_t position = 0;
  std::string message;
};

struct ParsedCompletion {
  bool has_think_tag = false;
  bool has_answer_tag = false;
  std::optional<std::string> think_text;
  std::vector<HoiInstance> instances;  // empty whenever has_answer_tag is false
  std::vector<ParseDiagnostic> diagnostics;
};

inline constexpr std::string_view kThinkOpen = "<think>";
inline constexpr std::string_view kThinkClose = "</think>";
inline constexpr std::string_view kAnswerOpen = "<answer>";
inline constexpr std::string_view kAnswerClose = "</answer>";

inline constexpr std::size_t kDefaultMaxCompletionChars = 65536;

struct TagContents {
  std::optional<std::string> think;
  std::optional<std::string> answer;
};

/// Content of the first <think> and first <answer> blocks. An unclosed
/// block runs to the end of the text.
TagContents extract_tags(std::string_view text);

/// Parses answer text into instances. A strict JSON array is tried first; when
/// that fails, well-formed object entries are recovered and garbage between
/// them is skipped. Never throws.
std::vector<HoiInstance> parse_answer(std::string_view answer_text, std::vector<ParseDiagnostic>* diagnostics = nullptr);

/// Tag extraction plus answer parsing. Text longer than `max_chars` is
/// truncated first. Never throws.
ParsedCompletion parse_completion(std::string_view text, std::size_t max_chars = kDefaultMaxCompletionChars);

}  // namespace hoikit

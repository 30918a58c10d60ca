#pragma once

#include <string>

#include <json.hpp>

#include "hoikit/vocabulary.hpp"

namespace hoikit {

/// Question template settings. Section toggles support prompt ablations.
struct TemplateConfig {
  std::string role_line = "You are an HOI detection model.";
  bool include_task_description = true;
  bool include_reasoning_guidance = true;
  bool include_format_example = true;
  std::string reasoning_guidance =
      "Thinking Process:\n"
      "1. Identify every human in the image and localize each one with a bounding box.\n"
      "2. Analyze the actions each human is performing.\n"
      "3. Determine the interactions between each human and the surrounding objects, localize each object, "
      "and select its object class and the verb classes that apply.";
  std::string example_think = "There is one person riding a bicycle and holding its handlebar.";
  std::string example_answer =
      R"([{"human": [112, 64, 298, 410], "object": [96, 230, 330, 470], "object class": "bicycle", )"
      R"("verb class": ["hold", "ride"]}])";

  static TemplateConfig from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;
};

inline constexpr const char* kObjectsOpen = "<VALID OBJECT CLASSES>";
inline constexpr const char* kObjectsClose = "</VALID OBJECT CLASSES>";
inline constexpr const char* kInteractionsOpen = "<VALID INTERACTIONS>";
inline constexpr const char* kInteractionsClose = "</VALID INTERACTIONS>";

/// Task instruction (role, object list, valid interactions as "verb object"
/// lines grouped by object), reasoning guidance, and a format example.
/// Deterministic for a fixed config.
std::string build_prompt(const Vocabulary& vocab, const TemplateConfig& config = {});

}  // namespace hoikit

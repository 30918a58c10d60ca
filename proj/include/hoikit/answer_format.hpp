#pragma once

#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hoikit/annotations.hpp"

namespace hoikit {

/// Serializes GT pairs as the model's answer: a JSON array with one entry per
/// pair in annotation order, keys "human", "object", "object class",
/// "verb class"; boxes rounded half-up to integers; verbs of a pair merged.
std::string gt_to_answer(const GtImage& image, const Vocabulary& vocab);

/// One answer entry with the four canonical keys; boxes rounded half-up.
nlohmann::ordered_json answer_entry(const BBox& human, const BBox& object, const std::string& object_class,
                                    const std::vector<std::string>& verbs);

/// "<think>think</think><answer>answer</answer>"
std::string wrap_completion(std::string_view think, std::string_view answer);

}  // namespace hoikit

#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "hoikit/answer_parser.hpp"
#include "hoikit/hico_eval.hpp"
#include "hoikit/prompt.hpp"
#include "hoikit/reward.hpp"
#include "hoikit/sft.hpp"
#include "hoikit/training_math.hpp"

namespace hoikit {

/// Everything a run can be configured with. Defaults reproduce the reference
/// training setup where it is stated (format weights 0.2, group size 4); the
/// clip range, KL weight, SFT normalization and score synthesis are not stated
/// there and use common defaults.
struct Config {
  RewardWeights reward;
  std::size_t max_completion_chars = kDefaultMaxCompletionChars;
  GrpoParams grpo;
  int group_size = kDefaultGroupSize;
  bool sft_normalize = true;
  ScoreMode score_mode = ScoreMode::output_order;
  std::size_t rare_threshold = kRareThreshold;
  TemplateConfig prompt;
  EndpointConfig endpoint;

  std::optional<std::filesystem::path> vocabulary_path;
  std::optional<std::filesystem::path> dataset_path;
  std::optional<std::filesystem::path> train_dataset_path;
  std::optional<std::filesystem::path> rare_categories_path;
  AnnotationFormat dataset_format = AnnotationFormat::canonical;

  /// Unknown keys are ignored; type errors throw nlohmann::json::exception.
  /// Relative paths resolve against `base_dir`.
  static Config from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
  static Config load(const std::filesystem::path& path);
  nlohmann::ordered_json to_json() const;

  /// Applies "w_tag=0.3,w_b=0.1"-style overrides. Throws std::invalid_argument.
  void apply_weight_overrides(const std::string& overrides);
};

}  // namespace hoikit

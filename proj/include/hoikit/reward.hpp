#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hoikit/annotations.hpp"
#include "hoikit/answer_parser.hpp"
#include "hoikit/vocabulary.hpp"

namespace hoikit {

/// How a predicted pair collides with an earlier unique pair.
enum class DedupMode {
  pair_both,   ///< human IoU > t and object IoU > t
  either_box,  ///< human IoU > t or object IoU > t
};

const char* to_string(DedupMode mode);
DedupMode dedup_mode_from_string(const std::string& s);

struct RewardWeights {
  double w_tag = 0.2;
  double w_b = 0.2;
  double w_ko = 0.2;
  double w_kv = 0.2;
  double dedup_iou_threshold = 0.5;
  DedupMode dedup_mode = DedupMode::pair_both;

  double format_max() const { return w_tag + w_b + w_ko + w_kv; }
};

struct InstanceReward {
  double alpha = 0.0;
  double r_b = 0.0;
  double r_ko = 0.0;
  double r_kv = 0.0;
  bool duplicate = false;
};

struct MatchedPair {
  std::size_t pred_index = 0;  // index into the parsed instances
  std::size_t gt_index = 0;
  double similarity = 0.0;
};

struct RewardBreakdown {
  double r_tag = 0.0;
  double r_format = 0.0;
  double r_lo = 0.0;
  double r_lv = 0.0;
  double r_iou = 0.0;
  double total = 0.0;
  std::vector<InstanceReward> per_instance;
  std::vector<MatchedPair> matching;
};

/// true marks an instance that earns nothing beyond its share of the denominator.
using DuplicateFlags = std::vector<bool>;

/// Penalty for an entry with `key_count` keys: 4 / (4 + |key_count - 4|).
double key_penalty(int key_count);

/// Scans instances in order against the unique pairs seen so far. Instances
/// without two valid non-degenerate boxes are always flagged.
DuplicateFlags dedup_scan(const std::vector<HoiInstance>& instances, const RewardWeights& weights = {});

struct FormatReward {
  double r_tag = 0.0;
  double r_format = 0.0;
  std::vector<InstanceReward> per_instance;
};

FormatReward format_reward(const ParsedCompletion& parsed, const GtImage& gt, const Vocabulary& vocab,
                           const RewardWeights& weights, const DuplicateFlags& dup);

/// Sequential object-label reward with drop-on-match against the GT object multiset.
double object_label_reward(const ParsedCompletion& parsed, const GtImage& gt, const Vocabulary& vocab,
                           const DuplicateFlags& dup);

/// Sequential verb-label reward with drop-on-match against the GT verb multiset.
double verb_label_reward(const ParsedCompletion& parsed, const GtImage& gt, const Vocabulary& vocab,
                         const DuplicateFlags& dup);

struct IouReward {
  double r_iou = 0.0;
  std::vector<MatchedPair> matching;
};

/// Hungarian-matched mean pair similarity, normalized by the GT pair count.
IouReward hoi_iou_reward(const ParsedCompletion& parsed, const GtImage& gt, const DuplicateFlags& dup);

/// Every reward component for one completion. Total over arbitrary text.
RewardBreakdown score_parsed(const ParsedCompletion& parsed, const GtImage& gt, const Vocabulary& vocab,
                             const RewardWeights& weights = {});
RewardBreakdown score_sample(std::string_view text, const GtImage& gt, const Vocabulary& vocab,
                             const RewardWeights& weights = {},
                             std::size_t max_chars = kDefaultMaxCompletionChars);

/// Flat snake_case record; per-instance terms and matching as arrays.
nlohmann::ordered_json to_json(const RewardBreakdown& breakdown);

}  // namespace hoikit

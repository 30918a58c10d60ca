#include "hoikit/reward.hpp"

#include <algorithm>
#include <cstdlib>
#include <stdexcept>
#include <unordered_set>

#include "hoikit/hungarian.hpp"

namespace hoikit {

namespace {

bool has_valid_boxes(const HoiInstance& inst) {
  return inst.human && inst.object && !inst.human->degenerate() && !inst.object->degenerate();
}

// max(N_a, predicted count), or 1 when both are zero so empty inputs score 0.
double denominator(const ParsedCompletion& parsed, const GtImage& gt) {
  const std::size_t d = std::max(gt.pairs.size(), parsed.instances.size());
  return d == 0 ? 1.0 : static_cast<double>(d);
}

void check_flags(const ParsedCompletion& parsed, const DuplicateFlags& dup) {
  if (dup.size() != parsed.instances.size()) throw std::invalid_argument("duplicate flags do not match instances");
}

}  // namespace

const char* to_string(DedupMode mode) { return mode == DedupMode::pair_both ? "pair-both" : "either-box"; }

DedupMode dedup_mode_from_string(const std::string& s) {
  if (s == "pair-both") return DedupMode::pair_both;
  if (s == "either-box") return DedupMode::either_box;
  throw std::invalid_argument("unknown dedup mode '" + s + "' (expected pair-both or either-box)");
}

double key_penalty(int key_count) {
  const int n = kCanonicalKeyCount;
  return static_cast<double>(n) / static_cast<double>(n + std::abs(key_count - n));
}

DuplicateFlags dedup_scan(const std::vector<HoiInstance>& instances, const RewardWeights& weights) {
  DuplicateFlags flags(instances.size(), false);
  std::vector<BoxPair> unique;
  const double t = weights.dedup_iou_threshold;
  for (std::size_t i = 0; i < instances.size(); ++i) {
    const auto& inst = instances[i];
    if (!has_valid_boxes(inst)) {
      flags[i] = true;
      continue;
    }
    const BoxPair pair{*inst.human, *inst.object};
    const bool collides = std::any_of(unique.begin(), unique.end(), [&](const BoxPair& u) {
      const bool h = iou(pair.human, u.human) > t;
      const bool o = iou(pair.object, u.object) > t;
      return weights.dedup_mode == DedupMode::pair_both ? (h && o) : (h || o);
    });
    if (collides) {
      flags[i] = true;
    } else {
      unique.push_back(pair);
    }
  }
  return flags;
}

FormatReward format_reward(const ParsedCompletion& parsed, const GtImage& gt, const Vocabulary& vocab,
                           const RewardWeights& weights, const DuplicateFlags& dup) {
  check_flags(parsed, dup);
  FormatReward out;
  if (!parsed.has_answer_tag) return out;
  out.r_tag = parsed.has_think_tag ? 1.0 : 0.0;

  double sum = 0.0;
  for (std::size_t i = 0; i < parsed.instances.size(); ++i) {
    const auto& inst = parsed.instances[i];
    InstanceReward ir;
    ir.alpha = key_penalty(inst.key_count);
    ir.duplicate = dup[i];
    if (!ir.duplicate) {
      ir.r_b = inst.present_keys.contains(AnswerKey::human) && inst.present_keys.contains(AnswerKey::object) &&
                       has_valid_boxes(inst)
                   ? 1.0
                   : 0.0;
      ir.r_ko = inst.present_keys.contains(AnswerKey::object_class) && inst.object_class &&
                        vocab.resolve_object(*inst.object_class)
                    ? 1.0
                    : 0.0;
      if (inst.present_keys.contains(AnswerKey::verb_class) && !inst.verb_classes.empty()) {
        std::unordered_set<VerbId> distinct;
        for (const auto& v : inst.verb_classes) {
          if (const auto id = vocab.resolve_verb(v)) distinct.insert(*id);
        }
        ir.r_kv = static_cast<double>(distinct.size()) / static_cast<double>(inst.verb_classes.size());
      }
    }
    sum += ir.alpha * (weights.w_b * ir.r_b + weights.w_ko * ir.r_ko + weights.w_kv * ir.r_kv);
    out.per_instance.push_back(ir);
  }
  out.r_format = weights.w_tag * out.r_tag + sum / denominator(parsed, gt);
  return out;
}

double object_label_reward(const ParsedCompletion& parsed, const GtImage& gt, const Vocabulary& vocab,
                           const DuplicateFlags& dup) {
  check_flags(parsed, dup);
  if (!parsed.has_answer_tag) return 0.0;
  std::vector<ObjectId> remaining;
  for (const auto& p : gt.pairs) remaining.push_back(p.object_class);

  double sum = 0.0;
  for (std::size_t i = 0; i < parsed.instances.size(); ++i) {
    const auto& inst = parsed.instances[i];
    if (dup[i] || !inst.object_class) continue;
    const auto id = vocab.resolve_object(*inst.object_class);
    if (!id) continue;
    const auto it = std::find(remaining.begin(), remaining.end(), *id);
    if (it == remaining.end()) continue;
    remaining.erase(it);
    sum += key_penalty(inst.key_count);
  }
  return sum / denominator(parsed, gt);
}

double verb_label_reward(const ParsedCompletion& parsed, const GtImage& gt, const Vocabulary& vocab,
                         const DuplicateFlags& dup) {
  check_flags(parsed, dup);
  if (!parsed.has_answer_tag) return 0.0;
  std::vector<VerbId> remaining;
  for (const auto& p : gt.pairs) remaining.insert(remaining.end(), p.verb_classes.begin(), p.verb_classes.end());

  double sum = 0.0;
  for (std::size_t i = 0; i < parsed.instances.size(); ++i) {
    const auto& inst = parsed.instances[i];
    if (dup[i] || inst.verb_classes.empty()) continue;
    // Every predicted verb is tested against the multiset as it stood before
    // this instance; the set of matched labels is then dropped once each.
    std::size_t hits = 0;
    std::vector<VerbId> matched;
    for (const auto& v : inst.verb_classes) {
      const auto id = vocab.resolve_verb(v);
      if (!id || std::find(remaining.begin(), remaining.end(), *id) == remaining.end()) continue;
      ++hits;
      if (std::find(matched.begin(), matched.end(), *id) == matched.end()) matched.push_back(*id);
    }
    for (VerbId m : matched) remaining.erase(std::find(remaining.begin(), remaining.end(), m));
    sum += key_penalty(inst.key_count) / static_cast<double>(inst.verb_classes.size()) * static_cast<double>(hits);
  }
  return sum / denominator(parsed, gt);
}

IouReward hoi_iou_reward(const ParsedCompletion& parsed, const GtImage& gt, const DuplicateFlags& dup) {
  check_flags(parsed, dup);
  IouReward out;
  if (!parsed.has_answer_tag || gt.pairs.empty()) return out;
  std::vector<std::size_t> candidates;
  for (std::size_t i = 0; i < parsed.instances.size(); ++i) {
    if (!dup[i]) candidates.push_back(i);
  }
  if (candidates.empty()) return out;

  CostMatrix cost(candidates.size(), gt.pairs.size());
  std::vector<double> sim(candidates.size() * gt.pairs.size());
  for (std::size_t r = 0; r < candidates.size(); ++r) {
    const auto& inst = parsed.instances[candidates[r]];
    const BoxPair pred{*inst.human, *inst.object};
    for (std::size_t c = 0; c < gt.pairs.size(); ++c) {
      const double s = pair_similarity(pred, BoxPair{gt.pairs[c].human, gt.pairs[c].object});
      sim[r * gt.pairs.size() + c] = s;
      cost(r, c) = 1.0 - s;
    }
  }
  const auto assignment = hungarian_match(cost);
  double sum = 0.0;
  for (const auto& [r, c] : assignment.pairs) {
    const double s = sim[r * gt.pairs.size() + c];
    sum += s;
    out.matching.push_back({candidates[r], c, s});
  }
  out.r_iou = sum / static_cast<double>(gt.pairs.size());
  return out;
}

RewardBreakdown score_parsed(const ParsedCompletion& parsed, const GtImage& gt, const Vocabulary& vocab,
                             const RewardWeights& weights) {
  RewardBreakdown b;
  if (!parsed.has_answer_tag) return b;
  const auto dup = dedup_scan(parsed.instances, weights);
  auto fmt = format_reward(parsed, gt, vocab, weights, dup);
  b.r_tag = fmt.r_tag;
  b.r_format = fmt.r_format;
  b.per_instance = std::move(fmt.per_instance);
  b.r_lo = object_label_reward(parsed, gt, vocab, dup);
  b.r_lv = verb_label_reward(parsed, gt, vocab, dup);
  auto iou_part = hoi_iou_reward(parsed, gt, dup);
  b.r_iou = iou_part.r_iou;
  b.matching = std::move(iou_part.matching);
  b.total = b.r_format + b.r_lo + b.r_lv + b.r_iou;
  return b;
}

RewardBreakdown score_sample(std::string_view text, const GtImage& gt, const Vocabulary& vocab,
                             const RewardWeights& weights, std::size_t max_chars) {
  return score_parsed(parse_completion(text, max_chars), gt, vocab, weights);
}

nlohmann::ordered_json to_json(const RewardBreakdown& b) {
  nlohmann::ordered_json j;
  j["r_tag"] = b.r_tag;
  j["r_format"] = b.r_format;
  j["r_lo"] = b.r_lo;
  j["r_lv"] = b.r_lv;
  j["r_iou"] = b.r_iou;
  j["total"] = b.total;
  auto per = nlohmann::ordered_json::array();
  for (const auto& ir : b.per_instance) {
    per.push_back({{"alpha", ir.alpha}, {"r_b", ir.r_b}, {"r_ko", ir.r_ko}, {"r_kv", ir.r_kv},
                   {"duplicate", ir.duplicate}});
  }
  j["per_instance"] = std::move(per);
  auto match = nlohmann::ordered_json::array();
  for (const auto& m : b.matching) {
    match.push_back({{"pred_index", m.pred_index}, {"gt_index", m.gt_index}, {"similarity", m.similarity}});
  }
  j["matching"] = std::move(match);
  return j;
}

}  // namespace hoikit

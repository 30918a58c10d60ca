#pragma once

#include <cstddef>
#include <optional>
#include <set>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "hoikit/annotations.hpp"
#include "hoikit/answer_parser.hpp"
#include "hoikit/box.hpp"
#include "hoikit/vocabulary.hpp"

namespace hoikit {

struct PredictionTriplet {
  std::string image_id;
  BBox human;
  BBox object;
  HoiId hoi_category = 0;
  double score = 0.0;
};

/// Text outputs carry no confidence, so one has to be synthesized. Neither
/// rule is authoritative; `output_order` is the default.
enum class ScoreMode {
  output_order,  ///< 1 - rank * 1e-4, earlier instances rank higher
  constant,      ///< every triplet scores 1; ties keep input order
};

inline constexpr double kRankStep = 1e-4;
inline constexpr double kMatchIou = 0.5;

const char* to_string(ScoreMode mode);
ScoreMode score_mode_from_string(const std::string& s);

/// One triplet per valid (verb, object) category of each instance with valid
/// boxes and a resolvable object label. Repeated categories within one
/// instance are collapsed.
std::vector<PredictionTriplet> expand_triplets(const ParsedCompletion& parsed, std::string_view image_id,
                                               const Vocabulary& vocab, ScoreMode mode = ScoreMode::output_order);

/// Reads a pre-expanded prediction record: image_id, human, object, score and
/// either hoi_category or verb + object_class. nullopt with `error` set when invalid.
std::optional<PredictionTriplet> triplet_from_json(const nlohmann::json& j, const Vocabulary& vocab,
                                                   std::string& error);

/// Greedy matching of one image's predictions (already sorted by descending
/// score) against that image's GT pairs of `category`. Returns TP flags.
std::vector<bool> match_image(std::span<const PredictionTriplet> preds, std::span<const GtPair> gt,
                              const HoiTriple& category, double iou_threshold = kMatchIou);

/// All-point interpolated AP. nullopt when n_gt is 0 (category excluded).
std::optional<double> average_precision(const std::vector<bool>& ranked_tp, std::size_t n_gt);

struct MapCells {
  std::optional<double> full;
  std::optional<double> rare;
  std::optional<double> non_rare;
};

/// mAP values are fractions in [0,1]; reports render them as percentages.
struct EvalTable {
  std::vector<std::optional<double>> per_category_ap;        // Default setting
  std::vector<std::optional<double>> per_category_ap_known;  // Known-Object setting
  std::vector<std::size_t> per_category_gt;
  MapCells default_setting;
  MapCells known_object;
  std::set<HoiId> rare_set;
  std::size_t evaluated_categories = 0;
  std::size_t evaluated_rare = 0;
};

class UnknownImageError : public std::runtime_error {
 public:
  explicit UnknownImageError(std::vector<std::string> ids);
  const std::vector<std::string>& ids() const { return ids_; }

 private:
  std::vector<std::string> ids_;
};

struct EvalOptions {
  double iou_threshold = kMatchIou;
  unsigned workers = 1;
};

/// Throws UnknownImageError listing every prediction image_id missing from `dataset`.
EvalTable evaluate(std::span<const PredictionTriplet> predictions, const Dataset& dataset,
                   const std::set<HoiId>& rare_set, const EvalOptions& options = {});

nlohmann::ordered_json eval_report_json(const EvalTable& table, const Vocabulary& vocab);
/// Two-row aligned table: Default and Known Object, each Full / Rare / Non-Rare.
std::string format_eval_table(const EvalTable& table);

}  // namespace hoikit

#pragma once

#include <filesystem>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "hoikit/annotations.hpp"
#include "hoikit/config.hpp"
#include "hoikit/hico_eval.hpp"
#include "hoikit/reward.hpp"

namespace hoikit {

struct CompletionSample {
  std::string image_id;
  std::string completion;
};

/// Vocabulary, dataset and config bundled for in-process scoring. Immutable
/// after construction and safe to share across threads. The CLI goes through
/// the same calls, so results match it bit for bit.
class Session {
 public:
  Session(Config config, std::shared_ptr<const Dataset> dataset, std::set<HoiId> rare_set);

  const Config& config() const { return config_; }
  const Dataset& dataset() const { return *dataset_; }
  const Vocabulary& vocab() const { return dataset_->vocab(); }
  const std::set<HoiId>& rare_set() const { return rare_set_; }

  RewardBreakdown score_one(const CompletionSample& sample) const;
  /// Throws UnknownImageError naming every unknown image_id before scoring anything.
  std::vector<RewardBreakdown> score_batch(std::span<const CompletionSample> samples, unsigned workers = 1) const;
  std::vector<double> group_advantages(std::span<const double> rewards) const;
  std::vector<PredictionTriplet> expand(std::span<const CompletionSample> samples) const;
  EvalTable evaluate_map(std::span<const CompletionSample> samples, unsigned workers = 1) const;

 private:
  Config config_;
  std::shared_ptr<const Dataset> dataset_;
  std::set<HoiId> rare_set_;
};

/// Reads a rare-category list: a JSON array of category indices, or an
/// object with a "rare" array.
std::set<HoiId> load_rare_set(const std::filesystem::path& path, const Vocabulary& vocab);

/// Vocabulary named by the config, or the bundled one.
std::shared_ptr<const Vocabulary> load_vocabulary(const Config& config);

/// Builds a session from a config file. Needs paths.dataset. The rare set
/// comes from paths.rare_categories, else paths.train_dataset, else the
/// dataset itself.
std::shared_ptr<const Session> load_session(const std::filesystem::path& config_path);
std::shared_ptr<const Session> make_session(const Config& config);

}  // namespace hoikit

#include "hoikit/session.hpp"

#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "hoikit/parallel.hpp"
#include "hoikit/training_math.hpp"

namespace hoikit {

namespace {

void require_known(const Dataset& dataset, std::span<const CompletionSample> samples) {
  std::vector<std::string> unknown;
  for (const auto& s : samples) {
    if (!dataset.find(s.image_id) && std::find(unknown.begin(), unknown.end(), s.image_id) == unknown.end()) {
      unknown.push_back(s.image_id);
    }
  }
  if (!unknown.empty()) throw UnknownImageError(std::move(unknown));
}

}  // namespace

Session::Session(Config config, std::shared_ptr<const Dataset> dataset, std::set<HoiId> rare_set)
    : config_(std::move(config)), dataset_(std::move(dataset)), rare_set_(std::move(rare_set)) {
  if (!dataset_) throw std::invalid_argument("session needs a dataset");
}

RewardBreakdown Session::score_one(const CompletionSample& sample) const {
  const GtImage* gt = dataset_->find(sample.image_id);
  if (!gt) throw UnknownImageError({sample.image_id});
  return score_sample(sample.completion, *gt, vocab(), config_.reward, config_.max_completion_chars);
}

std::vector<RewardBreakdown> Session::score_batch(std::span<const CompletionSample> samples, unsigned workers) const {
  require_known(*dataset_, samples);
  std::vector<RewardBreakdown> out(samples.size());
  parallel_for(samples.size(), workers, [&](std::size_t i) { out[i] = score_one(samples[i]); });
  return out;
}

std::vector<double> Session::group_advantages(std::span<const double> rewards) const {
  return hoikit::group_advantages(rewards);
}

std::vector<PredictionTriplet> Session::expand(std::span<const CompletionSample> samples) const {
  std::vector<PredictionTriplet> triplets;
  for (const auto& s : samples) {
    const auto parsed = parse_completion(s.completion, config_.max_completion_chars);
    auto t = expand_triplets(parsed, s.image_id, vocab(), config_.score_mode);
    triplets.insert(triplets.end(), std::make_move_iterator(t.begin()), std::make_move_iterator(t.end()));
  }
  return triplets;
}

EvalTable Session::evaluate_map(std::span<const CompletionSample> samples, unsigned workers) const {
  require_known(*dataset_, samples);
  const auto triplets = expand(samples);
  EvalOptions options;
  options.workers = workers;
  return evaluate(triplets, *dataset_, rare_set_, options);
}

std::set<HoiId> load_rare_set(const std::filesystem::path& path, const Vocabulary& vocab) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open rare-category file: " + path.string());
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(in);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument(path.string() + ": " + e.what());
  }
  const nlohmann::json& list = doc.is_object() ? doc.at("rare") : doc;
  if (!list.is_array()) throw std::invalid_argument(path.string() + ": expected an array of category indices");
  std::set<HoiId> out;
  for (const auto& v : list) {
    const int id = v.get<int>();
    if (id < 0 || static_cast<std::size_t>(id) >= vocab.hoi_triples().size()) {
      throw std::invalid_argument(path.string() + ": category index " + std::to_string(id) + " out of range");
    }
    out.insert(id);
  }
  return out;
}

std::shared_ptr<const Vocabulary> load_vocabulary(const Config& config) {
  if (config.vocabulary_path) return std::make_shared<const Vocabulary>(Vocabulary::load(*config.vocabulary_path));
  return std::make_shared<const Vocabulary>(Vocabulary::hico_det());
}

std::shared_ptr<const Session> make_session(const Config& config) {
  if (!config.dataset_path) throw std::invalid_argument("config has no paths.dataset");
  auto vocab = load_vocabulary(config);
  auto loaded = load_annotations(*config.dataset_path, config.dataset_format, vocab, Split::test);
  auto dataset = std::make_shared<const Dataset>(std::move(loaded.dataset));
  std::set<HoiId> rare;
  if (config.rare_categories_path) {
    rare = load_rare_set(*config.rare_categories_path, *vocab);
  } else if (config.train_dataset_path) {
    auto train = load_annotations(*config.train_dataset_path, config.dataset_format, vocab, Split::train);
    rare = derive_rare_categories(train.dataset, config.rare_threshold);
  } else {
    rare = derive_rare_categories(*dataset, config.rare_threshold);
  }
  return std::make_shared<const Session>(config, std::move(dataset), std::move(rare));
}

std::shared_ptr<const Session> load_session(const std::filesystem::path& config_path) {
  return make_session(Config::load(config_path));
}

}  // namespace hoikit

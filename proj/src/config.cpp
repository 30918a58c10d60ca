#include "hoikit/config.hpp"

#include <fstream>
#include <sstream>
#include <stdexcept>

namespace hoikit {

namespace {

std::optional<std::filesystem::path> path_field(const nlohmann::json& j, const char* key,
                                                const std::filesystem::path& base) {
  if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
  std::filesystem::path p = j.at(key).get<std::string>();
  if (p.is_relative() && !base.empty()) p = base / p;
  return p;
}

}  // namespace

Config Config::from_json(const nlohmann::json& j, const std::filesystem::path& base_dir) {
  Config c;
  if (j.contains("reward")) {
    const auto& r = j.at("reward");
    c.reward.w_tag = r.value("w_tag", c.reward.w_tag);
    c.reward.w_b = r.value("w_b", c.reward.w_b);
    c.reward.w_ko = r.value("w_ko", c.reward.w_ko);
    c.reward.w_kv = r.value("w_kv", c.reward.w_kv);
    c.reward.dedup_iou_threshold = r.value("dedup_iou_threshold", c.reward.dedup_iou_threshold);
    if (r.contains("dedup_mode")) c.reward.dedup_mode = dedup_mode_from_string(r.at("dedup_mode").get<std::string>());
    c.max_completion_chars = r.value("max_completion_chars", c.max_completion_chars);
  }
  if (j.contains("grpo")) {
    const auto& g = j.at("grpo");
    c.grpo.clip_eps = g.value("clip_eps", c.grpo.clip_eps);
    c.grpo.beta = g.value("beta", c.grpo.beta);
    c.group_size = g.value("group_size", c.group_size);
    if (g.contains("ratio_mode")) {
      const auto m = g.at("ratio_mode").get<std::string>();
      if (m == "sequence") c.grpo.ratio_mode = RatioMode::sequence;
      else if (m == "token") c.grpo.ratio_mode = RatioMode::token;
      else throw std::invalid_argument("grpo.ratio_mode must be 'sequence' or 'token'");
    }
  }
  if (j.contains("sft")) c.sft_normalize = j.at("sft").value("normalize", c.sft_normalize);
  if (j.contains("eval")) {
    const auto& e = j.at("eval");
    if (e.contains("score_mode")) c.score_mode = score_mode_from_string(e.at("score_mode").get<std::string>());
    c.rare_threshold = e.value("rare_threshold", c.rare_threshold);
  }
  if (j.contains("prompt")) c.prompt = TemplateConfig::from_json(j.at("prompt"));
  if (j.contains("endpoint")) c.endpoint = EndpointConfig::from_json(j.at("endpoint"));
  if (j.contains("paths")) {
    const auto& p = j.at("paths");
    c.vocabulary_path = path_field(p, "vocabulary", base_dir);
    c.dataset_path = path_field(p, "dataset", base_dir);
    c.train_dataset_path = path_field(p, "train_dataset", base_dir);
    c.rare_categories_path = path_field(p, "rare_categories", base_dir);
    if (p.contains("dataset_format")) {
      const auto f = p.at("dataset_format").get<std::string>();
      if (f == "canonical") c.dataset_format = AnnotationFormat::canonical;
      else if (f == "hico_json") c.dataset_format = AnnotationFormat::hico_json;
      else throw std::invalid_argument("paths.dataset_format must be 'canonical' or 'hico_json'");
    }
  }
  if (c.group_size < 2) throw std::invalid_argument("grpo.group_size must be at least 2");
  return c;
}

Config Config::load(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file: " + path.string());
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in, nullptr, true, true);
  } catch (const nlohmann::json::parse_error& e) {
    throw std::invalid_argument("config " + path.string() + ": " + e.what());
  }
  return from_json(j, path.parent_path());
}

nlohmann::ordered_json Config::to_json() const {
  nlohmann::ordered_json j;
  j["reward"] = {{"w_tag", reward.w_tag},
                 {"w_b", reward.w_b},
                 {"w_ko", reward.w_ko},
                 {"w_kv", reward.w_kv},
                 {"dedup_iou_threshold", reward.dedup_iou_threshold},
                 {"dedup_mode", to_string(reward.dedup_mode)},
                 {"max_completion_chars", max_completion_chars}};
  j["grpo"] = {{"clip_eps", grpo.clip_eps},
               {"beta", grpo.beta},
               {"group_size", group_size},
               {"ratio_mode", grpo.ratio_mode == RatioMode::sequence ? "sequence" : "token"}};
  j["sft"] = {{"normalize", sft_normalize}};
  j["eval"] = {{"score_mode", to_string(score_mode)}, {"rare_threshold", rare_threshold}};
  return j;
}

void Config::apply_weight_overrides(const std::string& overrides) {
  std::stringstream ss(overrides);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (item.empty()) continue;
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw std::invalid_argument("weight override '" + item + "' is not key=value");
    const std::string key = item.substr(0, eq);
    double value = 0.0;
    try {
      std::size_t used = 0;
      value = std::stod(item.substr(eq + 1), &used);
      if (used != item.size() - eq - 1) throw std::invalid_argument("trailing characters");
    } catch (const std::exception&) {
      throw std::invalid_argument("weight override '" + item + "' has a non-numeric value");
    }
    if (value < 0.0) throw std::invalid_argument("weight override '" + item + "' is negative");
    if (key == "w_tag") reward.w_tag = value;
    else if (key == "w_b") reward.w_b = value;
    else if (key == "w_ko") reward.w_ko = value;
    else if (key == "w_kv") reward.w_kv = value;
    else throw std::invalid_argument("unknown weight '" + key + "' (expected w_tag, w_b, w_ko, w_kv)");
  }
}

}  // namespace hoikit

#include <doctest.h>

#include <fstream>

#include "hoikit/answer_format.hpp"
#include "hoikit/config.hpp"
#include "hoikit/session.hpp"
#include "hoikit/simulate.hpp"
#include "support.hpp"

using namespace hoikit;
using namespace hoikit::test;

namespace {

std::vector<CompletionSample> noisy_samples(std::size_t n, double level) {
  std::vector<CompletionSample> out;
  const auto& images = mini().images();
  for (std::size_t k = 0; k < n; ++k) {
    const auto& img = images[k % images.size()];
    out.push_back({img.image_id, simulate_policy(img, vocab(), NoiseProfile::at_level(level, derive_seed(3, k)))});
  }
  return out;
}

}  // namespace

TEST_CASE("config defaults and parsing") {
  const Config d;
  CHECK(d.reward.w_tag == 0.2);
  CHECK(d.reward.format_max() == doctest::Approx(0.8));
  CHECK(d.group_size == 4);
  CHECK(d.reward.dedup_mode == DedupMode::pair_both);

  const auto c = Config::from_json(nlohmann::json::parse(R"({
    "reward": {"w_tag": 0.5, "dedup_mode": "either-box", "max_completion_chars": 100},
    "grpo": {"clip_eps": 0.1, "beta": 0.0, "group_size": 8, "ratio_mode": "token"},
    "sft": {"normalize": false},
    "eval": {"score_mode": "constant", "rare_threshold": 5},
    "paths": {"dataset": "d.json", "rare_categories": "/abs/rare.json", "dataset_format": "hico_json"},
    "unknown": 1})"),
                                   "/base");
  CHECK(c.reward.w_tag == 0.5);
  CHECK(c.reward.w_b == 0.2);
  CHECK(c.max_completion_chars == 100);
  CHECK(c.grpo.clip_eps == 0.1);
  CHECK(c.grpo.ratio_mode == RatioMode::token);
  CHECK(c.group_size == 8);
  CHECK_FALSE(c.sft_normalize);
  CHECK(c.score_mode == ScoreMode::constant);
  CHECK(c.rare_threshold == 5);
  CHECK(*c.dataset_path == std::filesystem::path("/base/d.json"));
  CHECK(*c.rare_categories_path == std::filesystem::path("/abs/rare.json"));
  CHECK(c.dataset_format == AnnotationFormat::hico_json);
  CHECK_FALSE(c.train_dataset_path);

  const auto echoed = Config::from_json(c.to_json());
  CHECK(echoed.to_json() == c.to_json());
}

TEST_CASE("config errors") {
  CHECK_THROWS_AS(Config::from_json(nlohmann::json::parse(R"({"grpo":{"group_size":1}})")), std::invalid_argument);
  CHECK_THROWS_AS(Config::from_json(nlohmann::json::parse(R"({"grpo":{"ratio_mode":"batch"}})")), std::invalid_argument);
  CHECK_THROWS_AS(Config::from_json(nlohmann::json::parse(R"({"eval":{"score_mode":"x"}})")), std::invalid_argument);
  CHECK_THROWS(Config::from_json(nlohmann::json::parse(R"({"reward":{"w_tag":"high"}})")));
  CHECK_THROWS_AS(Config::load("/nonexistent/hoikit.json"), std::runtime_error);

  TempDir dir;
  {
    std::ofstream(dir / "bad.json") << "{ not json";
    std::ofstream(dir / "commented.json") << "// weights\n{\"reward\": {\"w_b\": 0.4} /* inline */}\n";
  }
  CHECK_THROWS_AS(Config::load(dir / "bad.json"), std::invalid_argument);
  CHECK(Config::load(dir / "commented.json").reward.w_b == 0.4);
}

TEST_CASE("weight overrides") {
  Config c;
  c.apply_weight_overrides("w_tag=0.3,w_kv=0");
  CHECK(c.reward.w_tag == 0.3);
  CHECK(c.reward.w_kv == 0.0);
  CHECK(c.reward.w_b == 0.2);
  CHECK_THROWS_AS(c.apply_weight_overrides("w_x=1"), std::invalid_argument);
  CHECK_THROWS_AS(c.apply_weight_overrides("w_b"), std::invalid_argument);
  CHECK_THROWS_AS(c.apply_weight_overrides("w_b=abc"), std::invalid_argument);
  CHECK_THROWS_AS(c.apply_weight_overrides("w_b=0.1x"), std::invalid_argument);
  CHECK_THROWS_AS(c.apply_weight_overrides("w_b=-1"), std::invalid_argument);
}

TEST_CASE("session from the fixture config") {
  const auto s = load_session(data("mini_config.json"));
  CHECK(s->dataset().size() == 20);
  CHECK(s->rare_set() == derive_rare_categories(mini()));

  const auto samples = noisy_samples(1000, 0.15);
  const auto batch = s->score_batch(samples, 4);
  REQUIRE(batch.size() == samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto direct = score_sample(samples[i].completion, *mini().find(samples[i].image_id), vocab());
    CHECK(batch[i].total == direct.total);
    CHECK(to_json(batch[i]) == to_json(direct));
  }
  CHECK(s->score_batch({}).empty());

  std::vector<CompletionSample> echo;
  for (const auto& img : mini().images())
    echo.push_back({img.image_id, wrap_completion("", gt_to_answer(img, vocab()))});
  const auto t = s->evaluate_map(echo, 2);
  CHECK(*t.default_setting.full == 1.0);
  CHECK(*t.known_object.full == 1.0);
  CHECK(s->expand(echo).size() == 47);

  const std::vector<double> rewards{0.0, 1.0};
  CHECK(s->group_advantages(rewards) == std::vector<double>{-1.0, 1.0});
}

TEST_CASE("session rejects unknown images before scoring") {
  const auto s = load_session(data("mini_config.json"));
  std::vector<CompletionSample> samples{{"fx_000", "x"}, {"ghost_1", "y"}, {"ghost_2", "z"}};
  try {
    s->score_batch(samples);
    FAIL("expected UnknownImageError");
  } catch (const UnknownImageError& e) {
    CHECK(e.ids() == std::vector<std::string>{"ghost_1", "ghost_2"});
  }
  CHECK_THROWS_AS(s->score_one({"ghost_3", ""}), UnknownImageError);
  CHECK_THROWS_AS(s->evaluate_map(samples), UnknownImageError);
}

TEST_CASE("session honours configured weights and rare lists") {
  TempDir dir;
  {
    std::ofstream(dir / "rare.json") << R"({"rare": [18, 11]})";
    std::ofstream(dir / "cfg.json") << nlohmann::json{{"reward", {{"w_tag", 0.0}}},
                                                      {"paths",
                                                       {{"dataset", data("mini_canonical.json").string()},
                                                        {"rare_categories", "rare.json"}}}}
                                           .dump();
  }
  const auto s = load_session(dir / "cfg.json");
  CHECK(s->rare_set() == std::set<HoiId>{11, 18});
  const auto& img = mini().images()[0];
  CHECK(s->score_one({img.image_id, wrap_completion("", gt_to_answer(img, vocab()))}).total ==
        doctest::Approx(3.6).epsilon(1e-12));

  std::ofstream(dir / "bad_rare.json") << "[9999]";
  CHECK_THROWS(load_rare_set(dir / "bad_rare.json", vocab()));
  CHECK_THROWS_AS(make_session(Config{}), std::invalid_argument);

  Config missing;
  missing.dataset_path = dir / "nope.json";
  try {
    make_session(missing);
    FAIL("expected an error");
  } catch (const std::runtime_error& e) {
    CHECK(std::string(e.what()).find("nope.json") != std::string::npos);
  }
}

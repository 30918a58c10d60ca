#include <doctest.h>

#include <fstream>
#include <sstream>

#include "hoikit/answer_format.hpp"
#include "hoikit/answer_parser.hpp"
#include "hoikit/prompt.hpp"
#include "hoikit/reward.hpp"
#include "hoikit/sft.hpp"
#include "hoikit/simulate.hpp"
#include "support.hpp"

using namespace hoikit;
using namespace hoikit::test;

namespace {

std::string between(const std::string& s, const std::string& open, const std::string& close) {
  const auto a = s.find(open);
  const auto b = s.find(close);
  REQUIRE(a != std::string::npos);
  REQUIRE(b != std::string::npos);
  return s.substr(a + open.size(), b - a - open.size());
}

std::vector<std::string> lines_of(const std::string& s) {
  std::vector<std::string> out;
  std::istringstream in(s);
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) out.push_back(line);
  return out;
}

}  // namespace

TEST_CASE("prompt lists every object once and exactly the valid interactions") {
  const auto p = build_prompt(vocab());
  CHECK(p == build_prompt(vocab()));
  CHECK(p.find("<think>") != std::string::npos);
  CHECK(p.find("<answer>") != std::string::npos);

  const auto objects_block = between(p, kObjectsOpen, kObjectsClose);
  std::vector<std::string> objects;
  std::istringstream in(objects_block);
  std::string item;
  while (std::getline(in, item, ',')) {
    const auto b = item.find_first_not_of(" \n"), e = item.find_last_not_of(" \n");
    objects.push_back(item.substr(b, e - b + 1));
  }
  CHECK(objects == vocab().objects());

  const auto interactions = lines_of(between(p, kInteractionsOpen, kInteractionsClose));
  REQUIRE(interactions.size() == Vocabulary::kHicoCategories);
  std::set<std::string> expected, seen(interactions.begin(), interactions.end());
  for (const auto& t : vocab().hoi_triples()) expected.insert(vocab().verb_name(t.verb) + " " + vocab().object_name(t.object));
  CHECK(seen == expected);
  CHECK(seen.count("ride bicycle"));
  CHECK_FALSE(seen.count("eat bicycle"));
}

TEST_CASE("prompt section toggles") {
  TemplateConfig c;
  c.include_reasoning_guidance = false;
  c.include_format_example = false;
  const auto p = build_prompt(vocab(), c);
  CHECK(p.find("Thinking Process") == std::string::npos);
  CHECK(p.find(c.example_answer) == std::string::npos);
  CHECK(p.find(kInteractionsOpen) != std::string::npos);
  CHECK(build_prompt(vocab()).find(c.example_answer) != std::string::npos);
  const auto round = TemplateConfig::from_json(c.to_json());
  CHECK(build_prompt(vocab(), round) == p);
}

TEST_CASE("gt_to_answer rounds half up and keeps annotation order") {
  GtImage img{"a", 640, 480, {gt_pair({10.5, 20.49, 30.5, 40.51}, {1.5, 2.5, 3.5, 4.5}, "bicycle", {"ride", "hold"}),
                              gt_pair({0, 0, 5, 5}, {1, 1, 9, 9}, "cup", {"hold"})}};
  const auto j = nlohmann::json::parse(gt_to_answer(img, vocab()));
  REQUIRE(j.size() == 2);
  CHECK(j[0]["human"] == nlohmann::json::array({11, 20, 31, 41}));
  CHECK(j[0]["object"] == nlohmann::json::array({2, 3, 4, 5}));
  CHECK(j[0]["object class"] == "bicycle");
  CHECK(j[0]["verb class"] == nlohmann::json::array({"hold", "ride"}));
  CHECK(j[1]["object class"] == "cup");
  CHECK(wrap_completion("t", "[]") == "<think>t</think><answer>[]</answer>");
}

TEST_CASE("gt_to_answer round-trips through the parser on the fixture") {
  for (const auto& img : mini().images()) {
    const auto parsed = parse_completion(wrap_completion("x", gt_to_answer(img, vocab())));
    REQUIRE(parsed.instances.size() == img.pairs.size());
    for (std::size_t i = 0; i < img.pairs.size(); ++i) {
      CHECK(*parsed.instances[i].human == img.pairs[i].human);
      CHECK(*parsed.instances[i].object_class == vocab().object_name(img.pairs[i].object_class));
      CHECK(parsed.instances[i].verb_classes.size() == img.pairs[i].verb_classes.size());
    }
  }
}

TEST_CASE("simulated policy") {
  const auto& img = mini().images()[8];
  const auto zero = NoiseProfile{};
  CHECK(simulate_policy(img, vocab(), zero) == wrap_completion(simulated_think(img), gt_to_answer(img, vocab())));

  const auto noisy = NoiseProfile::at_level(0.3, derive_seed(7, 3));
  CHECK(simulate_policy(img, vocab(), noisy) == simulate_policy(img, vocab(), noisy));
  CHECK(derive_seed(7, 3) != derive_seed(7, 4));
  CHECK(derive_seed(7, 3) != derive_seed(8, 3));

  NoiseProfile broken;
  broken.format_break_prob = 1.0;
  for (const auto& im : mini().images()) {
    const auto text = simulate_policy(im, vocab(), broken);
    CHECK(text.find("<answer>") == std::string::npos);
    CHECK_FALSE(parse_completion(text).has_answer_tag);
  }

  NoiseProfile bad;
  bad.label_swap_prob = 1.5;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  bad = NoiseProfile{};
  bad.box_jitter_sigma = -0.1;
  CHECK_THROWS_AS(bad.validate(), std::invalid_argument);
  const auto j = NoiseProfile::from_json(noisy.to_json());
  CHECK(j.to_json() == noisy.to_json());
}

TEST_CASE("portable rng is pinned") {
  PortableRng a(42), b(42);
  for (int i = 0; i < 100; ++i) {
    const double u = a.uniform();
    CHECK(u == b.uniform());
    CHECK(u >= 0.0);
    CHECK(u < 1.0);
    const auto k = a.index(7);
    CHECK(k == b.index(7));
    CHECK(k < 7);
    CHECK(a.normal() == b.normal());
  }
}

TEST_CASE("sft assembly") {
  TraceMap all;
  for (const auto& img : mini().images()) all[img.image_id] = "reasoning for " + img.image_id;
  const auto full = assemble_sft(mini(), all);
  CHECK(full.records.size() == 20);
  CHECK(full.skipped == 0);

  TraceMap partial;
  for (std::size_t i = 0; i < 15; ++i) partial[mini().images()[i].image_id] = "r" + std::to_string(i);
  const auto part = assemble_sft(mini(), partial);
  CHECK(part.records.size() == 15);
  CHECK(part.skipped == 5);

  // Naive reference.
  const auto prompt = build_prompt(vocab());
  std::size_t k = 0;
  for (const auto& img : mini().images()) {
    if (!partial.count(img.image_id)) continue;
    const auto& r = part.records[k++];
    CHECK(r.image_id == img.image_id);
    CHECK(r.prompt == prompt);
    CHECK(r.think == partial[img.image_id]);
    CHECK(r.answer == gt_to_answer(img, vocab()));
    // Every assembled answer earns the full format reward.
    const auto s = score_sample(wrap_completion(r.think, r.answer), img, vocab());
    CHECK(s.total == doctest::Approx(3.8).epsilon(1e-12));
  }
  CHECK(part.records[0].to_json().dump().find("\"think\"") != std::string::npos);
}

TEST_CASE("read_traces skips malformed lines and the meta header") {
  TempDir dir;
  const auto path = dir / "traces.jsonl";
  {
    std::ofstream out(path);
    out << R"({"_meta":{"tool":"hoikit"}})" << '\n'
        << R"({"image_id":"fx_000","think":"a"})" << '\n'
        << "not json\n\n"
        << R"({"image_id":"fx_001"})" << '\n'
        << R"({"image_id":"fx_002","think":"c"})" << '\n';
  }
  std::size_t bad = 0;
  const auto t = read_traces(path, &bad);
  CHECK(t.size() == 2);
  CHECK(t.at("fx_002") == "c");
  CHECK(bad == 2);
  CHECK(read_traces(dir / "missing.jsonl").empty());
}

TEST_CASE("trace_from_response") {
  CHECK(*trace_from_response(R"({"choices":[{"message":{"content":"T"}}]})") == "T");
  CHECK(*trace_from_response(R"({"choices":[{"message":{"content":"<think> inner </think><answer>[]</answer>"}}]})") ==
        "inner");
  CHECK_FALSE(trace_from_response(R"({"choices":[]})"));
  CHECK_FALSE(trace_from_response("garbage"));
  CHECK_FALSE(trace_from_response(R"({"choices":[{"message":{}}]})"));
}

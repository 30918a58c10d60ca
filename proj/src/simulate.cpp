#include "hoikit/simulate.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

#include "hoikit/answer_format.hpp"
#include "hoikit/answer_parser.hpp"

namespace hoikit {

NoiseProfile NoiseProfile::at_level(double level, std::uint64_t seed) {
  NoiseProfile p;
  p.box_jitter_sigma = level;
  p.label_swap_prob = level;
  p.verb_drop_prob = level;
  p.instance_drop_prob = level / 2.0;
  p.instance_dup_prob = level / 2.0;
  p.format_break_prob = level / 4.0;
  p.seed = seed;
  return p;
}

NoiseProfile NoiseProfile::from_json(const nlohmann::json& j) {
  NoiseProfile p;
  if (j.contains("level")) p = at_level(j.at("level").get<double>(), j.value("seed", std::uint64_t{0}));
  p.box_jitter_sigma = j.value("box_jitter_sigma", p.box_jitter_sigma);
  p.label_swap_prob = j.value("label_swap_prob", p.label_swap_prob);
  p.verb_drop_prob = j.value("verb_drop_prob", p.verb_drop_prob);
  p.instance_drop_prob = j.value("instance_drop_prob", p.instance_drop_prob);
  p.instance_dup_prob = j.value("instance_dup_prob", p.instance_dup_prob);
  p.format_break_prob = j.value("format_break_prob", p.format_break_prob);
  p.seed = j.value("seed", p.seed);
  p.validate();
  return p;
}

nlohmann::json NoiseProfile::to_json() const {
  return {{"box_jitter_sigma", box_jitter_sigma}, {"label_swap_prob", label_swap_prob},
          {"verb_drop_prob", verb_drop_prob},     {"instance_drop_prob", instance_drop_prob},
          {"instance_dup_prob", instance_dup_prob}, {"format_break_prob", format_break_prob},
          {"seed", seed}};
}

void NoiseProfile::validate() const {
  auto prob = [](double p, const char* name) {
    if (!(p >= 0.0 && p <= 1.0)) throw std::invalid_argument(std::string(name) + " must be in [0,1]");
  };
  prob(label_swap_prob, "label_swap_prob");
  prob(verb_drop_prob, "verb_drop_prob");
  prob(instance_drop_prob, "instance_drop_prob");
  prob(instance_dup_prob, "instance_dup_prob");
  prob(format_break_prob, "format_break_prob");
  if (!(box_jitter_sigma >= 0.0) || !std::isfinite(box_jitter_sigma)) {
    throw std::invalid_argument("box_jitter_sigma must be a finite non-negative number");
  }
}

std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t index) {
  std::uint64_t z = run_seed + 0x9E3779B97F4A7C15ULL * (index + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

double PortableRng::uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

double PortableRng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  const double u1 = 1.0 - uniform();  // (0, 1]
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  spare_ = r * std::sin(theta);
  has_spare_ = true;
  return r * std::cos(theta);
}

std::size_t PortableRng::index(std::size_t n) {
  const auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
  return i < n ? i : n - 1;
}

std::string simulated_think(const GtImage& image) {
  return "The image contains " + std::to_string(image.pairs.size()) +
         " human-object pairs. I locate each human, analyze the action, and identify the object involved.";
}

std::string simulate_policy(const GtImage& image, const Vocabulary& vocab, const NoiseProfile& noise) {
  noise.validate();
  PortableRng rng(noise.seed);
  auto jitter = [&](const BBox& b) {
    if (noise.box_jitter_sigma == 0.0) return b;
    const double sw = noise.box_jitter_sigma * b.width();
    const double sh = noise.box_jitter_sigma * b.height();
    const double x1 = b.x1 + sw * rng.normal();
    const double y1 = b.y1 + sh * rng.normal();
    const double x2 = b.x2 + sw * rng.normal();
    const double y2 = b.y2 + sh * rng.normal();
    return BBox::canonical(x1, y1, x2, y2);
  };

  auto entries = nlohmann::ordered_json::array();
  for (const auto& pair : image.pairs) {
    if (rng.uniform() < noise.instance_drop_prob) continue;
    const BBox human = jitter(pair.human);
    const BBox object = jitter(pair.object);
    std::string object_class = vocab.object_name(pair.object_class);
    if (rng.uniform() < noise.label_swap_prob) object_class = vocab.objects()[rng.index(vocab.objects().size())];
    std::vector<std::string> verbs;
    for (VerbId v : pair.verb_classes) {
      if (rng.uniform() < noise.verb_drop_prob) continue;
      if (rng.uniform() < noise.label_swap_prob) {
        verbs.push_back(vocab.verbs()[rng.index(vocab.verbs().size())]);
      } else {
        verbs.push_back(vocab.verb_name(v));
      }
    }
    auto entry = answer_entry(human, object, object_class, verbs);
    const bool dup = rng.uniform() < noise.instance_dup_prob;
    entries.push_back(entry);
    if (dup) entries.push_back(std::move(entry));
  }

  const std::string think = simulated_think(image);
  const std::string answer = entries.dump();
  if (rng.uniform() < noise.format_break_prob) {
    switch (rng.index(3)) {
      case 0: return std::string(kThinkOpen) + think + std::string(kThinkClose) + "Answer: " + answer;
      case 1: return std::string(kThinkOpen) + think + std::string(kThinkClose) + answer;
      default: return std::string(kThinkOpen) + think + std::string(kThinkClose) + "<answr>" + answer + "</answr>";
    }
  }
  return wrap_completion(think, answer);
}

}  // namespace hoikit

#pragma once

#include <cstdint>
#include <random>
#include <string>

#include <json.hpp>

#include "hoikit/annotations.hpp"

namespace hoikit {

/// Corruptions applied to the canonical GT answer to imitate a noisy policy.
struct NoiseProfile {
  double box_jitter_sigma = 0.0;  ///< Gaussian std as a fraction of box width/height
  double label_swap_prob = 0.0;   ///< per object label and per verb
  double verb_drop_prob = 0.0;    ///< per verb
  double instance_drop_prob = 0.0;
  double instance_dup_prob = 0.0;
  double format_break_prob = 0.0;  ///< removes the <answer> tag
  std::uint64_t seed = 0;

  /// One-knob profile: jitter, swap and drop at `level`, instance drop/dup at
  /// level/2, format break at level/4.
  static NoiseProfile at_level(double level, std::uint64_t seed);
  static NoiseProfile from_json(const nlohmann::json& j);
  nlohmann::json to_json() const;

  /// Throws std::invalid_argument when a probability is outside [0,1] or sigma is negative.
  void validate() const;
};

/// Per-sample seed derived from a run seed and a sample index (splitmix64).
std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t index);

/// Portable random source: mt19937_64 bits with hand-rolled transforms, so a
/// seed gives the same stream on every standard library.
class PortableRng {
 public:
  explicit PortableRng(std::uint64_t seed) : engine_(seed) {}
  double uniform();  // [0, 1)
  double normal();   // N(0, 1), Box-Muller
  std::size_t index(std::size_t n);

 private:
  std::mt19937_64 engine_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

/// Completion text for `image`: think/answer-wrapped canonical answer with the
/// profile's corruptions applied. A zero profile reproduces
/// wrap_completion(simulated_think(image), gt_to_answer(image)) exactly.
std::string simulate_policy(const GtImage& image, const Vocabulary& vocab, const NoiseProfile& noise);

std::string simulated_think(const GtImage& image);

}  // namespace hoikit

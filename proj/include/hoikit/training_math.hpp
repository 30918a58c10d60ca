#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace hoikit {

inline constexpr int kDefaultGroupSize = 4;
/// Clip range and KL weight are not given for the reference runs; these are
/// the common GRPO defaults and are exposed through the config file.
inline constexpr double kDefaultClipEps = 0.2;
inline constexpr double kDefaultKlBeta = 0.04;
inline constexpr double kDegenerateStd = 1e-8;

/// Per-token log-probabilities with an inclusion mask of the same length.
struct TokenLogProbs {
  std::vector<double> values;
  std::vector<std::uint8_t> mask;

  /// All tokens included.
  static TokenLogProbs dense(std::vector<double> values);
};

/// (r_i - mean) / population std. All zeros when std < 1e-8.
/// Throws std::invalid_argument for fewer than 2 rewards.
std::vector<double> group_advantages(std::span<const double> rewards);

enum class RatioMode {
  sequence,  ///< one importance ratio per output from the summed log-ratio
  token,     ///< per-token ratios, surrogate averaged over masked tokens
};

struct GrpoParams {
  double clip_eps = kDefaultClipEps;
  double beta = kDefaultKlBeta;
  RatioMode ratio_mode = RatioMode::sequence;
};

/// Log-probabilities of one sampled output under the current, behaviour and reference policies.
struct GrpoSample {
  TokenLogProbs current;
  TokenLogProbs old;
  TokenLogProbs ref;
};

/// min(exp(log_ratio) * adv, clip(exp(log_ratio), 1-eps, 1+eps) * adv).
double clipped_surrogate(double log_ratio, double advantage, double clip_eps);

/// Mean over masked tokens of exp(ref - cur) - (ref - cur) - 1. Non-negative.
double kl_estimate(const TokenLogProbs& current, const TokenLogProbs& ref);

/// Negated group mean of (surrogate - beta * KL). The mask of `current` selects
/// tokens; all three sequences must share its length. Throws
/// std::invalid_argument on length mismatch or non-finite input.
double grpo_objective(std::span<const GrpoSample> samples, std::span<const double> advantages,
                      const GrpoParams& params = {});

/// Negative log-likelihood of the supervised reasoning and answer tokens,
/// divided by the number of masked-in tokens when `normalize` is set.
double sft_loss(const TokenLogProbs& reasoning, const TokenLogProbs& answer, bool normalize = true);

}  // namespace hoikit

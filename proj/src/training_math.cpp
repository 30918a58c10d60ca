#include "hoikit/training_math.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

namespace hoikit {

namespace {

void check_shape(const TokenLogProbs& t, const char* what) {
  if (t.values.size() != t.mask.size()) {
    throw std::invalid_argument(std::string(what) + ": values and mask lengths differ");
  }
}

void check_finite(const TokenLogProbs& t, const char* what) {
  for (std::size_t i = 0; i < t.values.size(); ++i) {
    if (t.mask[i] && !std::isfinite(t.values[i])) {
      throw std::invalid_argument(std::string(what) + ": non-finite log-probability at token " + std::to_string(i));
    }
  }
}

}  // namespace

TokenLogProbs TokenLogProbs::dense(std::vector<double> values) {
  TokenLogProbs t;
  t.mask.assign(values.size(), 1);
  t.values = std::move(values);
  return t;
}

std::vector<double> group_advantages(std::span<const double> rewards) {
  const std::size_t g = rewards.size();
  if (g < 2) throw std::invalid_argument("group_advantages: need at least 2 rewards, got " + std::to_string(g));
  double mean = 0.0;
  for (double r : rewards) mean += r;
  mean /= static_cast<double>(g);
  double var = 0.0;
  for (double r : rewards) var += (r - mean) * (r - mean);
  const double sd = std::sqrt(var / static_cast<double>(g));
  std::vector<double> adv(g, 0.0);
  if (!(sd >= kDegenerateStd)) return adv;
  for (std::size_t i = 0; i < g; ++i) adv[i] = (rewards[i] - mean) / sd;
  return adv;
}

double clipped_surrogate(double log_ratio, double advantage, double clip_eps) {
  const double s1 = std::exp(log_ratio);
  const double s2 = std::clamp(s1, 1.0 - clip_eps, 1.0 + clip_eps);
  return std::min(s1 * advantage, s2 * advantage);
}

double kl_estimate(const TokenLogProbs& current, const TokenLogProbs& ref) {
  check_shape(current, "current");
  if (ref.values.size() != current.values.size()) throw std::invalid_argument("kl_estimate: sequences differ in length");
  double sum = 0.0;
  std::size_t n = 0;
  for (std::size_t i = 0; i < current.values.size(); ++i) {
    if (!current.mask[i]) continue;
    const double d = ref.values[i] - current.values[i];
    sum += std::expm1(d) - d;
    ++n;
  }
  return n == 0 ? 0.0 : sum / static_cast<double>(n);
}

double grpo_objective(std::span<const GrpoSample> samples, std::span<const double> advantages,
                      const GrpoParams& params) {
  if (samples.size() != advantages.size()) {
    throw std::invalid_argument("grpo_objective: " + std::to_string(samples.size()) + " samples but " +
                                std::to_string(advantages.size()) + " advantages");
  }
  if (samples.empty()) throw std::invalid_argument("grpo_objective: empty group");
  double total = 0.0;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    const auto& s = samples[i];
    check_shape(s.current, "current");
    check_shape(s.old, "old");
    check_shape(s.ref, "ref");
    if (s.old.values.size() != s.current.values.size() || s.ref.values.size() != s.current.values.size()) {
      throw std::invalid_argument("grpo_objective: sequences of sample " + std::to_string(i) + " differ in length");
    }
    check_finite(s.current, "current");
    check_finite(TokenLogProbs{s.old.values, s.current.mask}, "old");
    check_finite(TokenLogProbs{s.ref.values, s.current.mask}, "ref");
    if (!std::isfinite(advantages[i])) throw std::invalid_argument("grpo_objective: non-finite advantage");

    double surrogate = 0.0;
    if (params.ratio_mode == RatioMode::sequence) {
      double log_ratio = 0.0;
      for (std::size_t t = 0; t < s.current.values.size(); ++t) {
        if (s.current.mask[t]) log_ratio += s.current.values[t] - s.old.values[t];
      }
      surrogate = clipped_surrogate(log_ratio, advantages[i], params.clip_eps);
    } else {
      std::size_t n = 0;
      for (std::size_t t = 0; t < s.current.values.size(); ++t) {
        if (!s.current.mask[t]) continue;
        surrogate += clipped_surrogate(s.current.values[t] - s.old.values[t], advantages[i], params.clip_eps);
        ++n;
      }
      if (n) surrogate /= static_cast<double>(n);
    }
    total += surrogate - params.beta * kl_estimate(s.current, s.ref);
  }
  return -total / static_cast<double>(samples.size());
}

double sft_loss(const TokenLogProbs& reasoning, const TokenLogProbs& answer, bool normalize) {
  check_shape(reasoning, "reasoning");
  check_shape(answer, "answer");
  double sum = 0.0;
  std::size_t n = 0;
  for (const auto* part : {&reasoning, &answer}) {
    for (std::size_t t = 0; t < part->values.size(); ++t) {
      if (!part->mask[t]) continue;
      sum += part->values[t];
      ++n;
    }
  }
  if (normalize && n > 0) return -sum / static_cast<double>(n);
  return -sum;
}

}  // namespace hoikit

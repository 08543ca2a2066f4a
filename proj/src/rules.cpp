#include "emofuse/rules.hpp"

#include <stdexcept>

namespace emofuse {

std::string_view to_string(Rule rule) {
  switch (rule) {
    case Rule::Rule1: return "1";
    case Rule::Rule2: return "2";
    default: return "none";
  }
}

std::optional<Rule> parse_rule(std::string_view name) {
  if (name == "1" || name == "rule1") return Rule::Rule1;
  if (name == "2" || name == "rule2") return Rule::Rule2;
  if (name == "none") return Rule::None;
  return std::nullopt;
}

void RuleConfig::validate() const {
  if (!(mask_threshold > 0.0 && mask_threshold < 1.0)) {
    throw std::invalid_argument("mask threshold must lie in (0, 1)");
  }
  table.validate();
}

Vec7 rule1_mask(const Vec7& fused, double threshold) {
  return (fused.array() < threshold).select(Vec7::Zero(), fused);
}

namespace {

CompoundScores pair_scores(const Vec7& probabilities, const CompoundWeightTable& table) {
  CompoundScores scores;
  for (int i = 0; i < kCompoundCount; ++i) {
    const auto& row = table.rows()[i];
    scores(i) = probabilities(static_cast<int>(row.first)) * row.weight_first.value() +
                probabilities(static_cast<int>(row.second)) * row.weight_second.value();
  }
  return scores;
}

}  // namespace

CompoundScores rule1_scores(const Vec7& masked) {
  return pair_scores(masked, pair_sum_table());
}

CompoundScores rule2_scores(const Vec7& fused, const CompoundWeightTable& table) {
  return pair_scores(fused, table);
}

CompoundExpression decide(const CompoundScores& scores) {
  return static_cast<CompoundExpression>(argmax_lowest(scores));
}

FramePrediction predict_ce(const ProbVector& fused, const RuleConfig& config) {
  FramePrediction prediction;

  if (config.rule == Rule::Rule2) {
    prediction.scores = rule2_scores(fused.values, config.table);
    prediction.decision = decide(prediction.scores);
    return prediction;
  }

  if (config.rule == Rule::None) {
    prediction.scores = rule1_scores(fused.values);
    prediction.decision = decide(prediction.scores);
    return prediction;
  }

  const Vec7 masked = rule1_mask(fused.values, config.mask_threshold);
  prediction.all_masked = (masked.array() == 0.0).all();
  prediction.neutral_dominant =
      !prediction.all_masked &&
      (masked.tail<kEmotionCount - 1>().array() == 0.0).all();
  prediction.scores = rule1_scores(masked);

  // Fused vectors need not sum to one, so masking can leave nothing; a
  // neutral-only survivor also scores zero for every pair.
  if ((prediction.scores.array() == 0.0).all() &&
      config.all_masked_policy == AllMaskedPolicy::UseUnmasked) {
    prediction.scores = rule1_scores(fused.values);
    prediction.used_fallback = true;
  }
  prediction.decision = decide(prediction.scores);
  return prediction;
}

}  // namespace emofuse

#pragma once

#include <optional>
#include <string_view>

#include "emofuse/emotions.hpp"

namespace emofuse {

enum class Rule { None, Rule1, Rule2 };

std::string_view to_string(Rule rule);
std::optional<Rule> parse_rule(std::string_view name);

/// What to do when masking leaves no usable probability mass: score the
/// unmasked vector instead, or fall through to the first compound class.
enum class AllMaskedPolicy { UseUnmasked, FirstClass };

struct RuleConfig {
  Rule rule = Rule::Rule2;
  double mask_threshold = 1.0 / kEmotionCount;
  CompoundWeightTable table = CompoundWeightTable::defaults();
  AllMaskedPolicy all_masked_policy = AllMaskedPolicy::UseUnmasked;

  /// Boundary validation for user-supplied configs; the mask threshold must
  /// lie strictly inside (0, 1).
  void validate() const;
};

/// Zeroes entries strictly below the threshold. Boundary values survive and
/// nothing is renormalized.
Vec7 rule1_mask(const Vec7& fused, double threshold);

/// Unweighted pair sums of the (masked) probabilities, one per compound class.
CompoundScores rule1_scores(const Vec7& masked);

/// Frequency-weighted pair scores using the fixed pair-weight table.
CompoundScores rule2_scores(const Vec7& fused, const CompoundWeightTable& table);

/// Argmax compound class; ties break to the lowest canonical index.
CompoundExpression decide(const CompoundScores& scores);

struct FramePrediction {
  CompoundExpression decision = CompoundExpression::FearfullySurprised;
  CompoundScores scores = CompoundScores::Zero();
  // Diagnostics: masking removed everything / only neutral survived /
  // the unmasked fallback produced the scores actually decided on.
  bool all_masked = false;
  bool neutral_dominant = false;
  bool used_fallback = false;
};

/// Applies the configured rule to one fused vector and decides the compound
/// class. Callers are responsible for pairing rule 1 with Dirichlet-fused
/// inputs only.
FramePrediction predict_ce(const ProbVector& fused, const RuleConfig& config);

}  // namespace emofuse

#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>

#include <Eigen/Dense>

namespace emofuse {

inline constexpr int kEmotionCount = 7;
inline constexpr int kCompoundCount = 7;

template <typename Scalar>
using Vec7T = Eigen::Matrix<Scalar, kEmotionCount, 1>;
using Vec7 = Vec7T<double>;

/// Frames-by-classes matrix holding one probability row per frame.
using StreamMatrix = Eigen::Matrix<double, Eigen::Dynamic, kEmotionCount>;

/// Scores over the compound classes, in canonical compound order.
using CompoundScores = Eigen::Matrix<double, kCompoundCount, 1>;

/// Canonical basic-emotion order. Every vector, file column and report row
/// uses this order; serialization is always by name, never by index.
enum class BasicEmotion : int {
  Neutral = 0,
  Anger,
  Disgust,
  Fear,
  Happiness,
  Sadness,
  Surprise,
};

/// Canonical compound-expression order.
enum class CompoundExpression : int {
  FearfullySurprised = 0,
  HappilySurprised,
  SadlySurprised,
  DisgustedlySurprised,
  AngrilySurprised,
  SadlyFearful,
  SadlyAngry,
};

inline constexpr std::array<std::string_view, kEmotionCount> kEmotionNames = {
    "neutral", "anger", "disgust", "fear", "happiness", "sadness", "surprise",
};

inline constexpr std::array<std::string_view, kCompoundCount> kCompoundNames = {
    "fearfully_surprised", "happily_surprised",  "sadly_surprised",
    "disgustedly_surprised", "angrily_surprised", "sadly_fearful",
    "sadly_angry",
};

std::string_view to_string(BasicEmotion emotion);
std::string_view to_string(CompoundExpression expression);
std::optional<BasicEmotion> parse_emotion(std::string_view name);
std::optional<CompoundExpression> parse_compound(std::string_view name);

/// Index of the largest coefficient; ties resolve to the lowest index so
/// decisions stay deterministic.
template <typename Derived>
int argmax_lowest(const Eigen::DenseBase<Derived>& values) {
  int best = 0;
  for (int i = 1; i < static_cast<int>(values.size()); ++i) {
    if (values(i) > values(best)) best = i;
  }
  return best;
}

inline constexpr double kNormalizedSumTolerance = 1e-6;

/// Per-frame distribution over the basic emotions. `normalized` marks raw
/// model output (sums to one); weighted and fused intermediates clear it
/// because per-class convex combination does not preserve the total.
struct ProbVector {
  Vec7 values = Vec7::Zero();
  bool normalized = false;

  /// Wraps a raw model distribution; requires nonnegative entries summing
  /// to one within kNormalizedSumTolerance.
  static ProbVector raw(const Vec7& values);

  /// Wraps a weighted or fused intermediate; requires nonnegative entries.
  static ProbVector weighted(const Vec7& values);

  double operator[](BasicEmotion emotion) const {
    return values(static_cast<int>(emotion));
  }

  /// Throws std::invalid_argument on negative entries or, when the
  /// normalized flag is set, on a total outside the tolerance.
  void validate() const;
};

inline Vec7 uniform_probabilities() {
  return Vec7::Constant(1.0 / kEmotionCount);
}

/// Exact rational weight. Table values are kept as integer fractions and
/// converted to floating point only where a score is computed.
struct Fraction {
  std::int64_t num = 0;
  std::int64_t den = 1;

  constexpr double value() const { return static_cast<double>(num) / static_cast<double>(den); }
};

struct CompoundPair {
  CompoundExpression expression;
  BasicEmotion first;
  Fraction weight_first;
  BasicEmotion second;
  Fraction weight_second;
};

/// Maps each compound class to its constituent emotion pair and pair weights.
class CompoundWeightTable {
 public:
  /// The experimentally fixed pair weights used by the weighted rule.
  static CompoundWeightTable defaults();

  const CompoundPair& row(CompoundExpression expression) const {
    return rows_[static_cast<int>(expression)];
  }
  const std::array<CompoundPair, kCompoundCount>& rows() const { return rows_; }

  /// Checks exact weight_first + weight_second == 1 per row using integer
  /// cross multiplication.
  void validate() const;

 private:
  friend CompoundWeightTable pair_sum_table();
  std::array<CompoundPair, kCompoundCount> rows_{};
};

/// The same pair mapping with unit coefficients; the masked rule and the
/// rule-free reduction score each compound class as a plain pair sum.
CompoundWeightTable pair_sum_table();

}  // namespace emofuse

#include "emofuse/emotions.hpp"

#include <stdexcept>

namespace emofuse {

std::string_view to_string(BasicEmotion emotion) {
  return kEmotionNames[static_cast<int>(emotion)];
}

std::string_view to_string(CompoundExpression expression) {
  return kCompoundNames[static_cast<int>(expression)];
}

std::optional<BasicEmotion> parse_emotion(std::string_view name) {
  for (int i = 0; i < kEmotionCount; ++i) {
    if (kEmotionNames[i] == name) return static_cast<BasicEmotion>(i);
  }
  return std::nullopt;
}

std::optional<CompoundExpression> parse_compound(std::string_view name) {
  for (int i = 0; i < kCompoundCount; ++i) {
    if (kCompoundNames[i] == name) return static_cast<CompoundExpression>(i);
  }
  return std::nullopt;
}

ProbVector ProbVector::raw(const Vec7& values) {
  ProbVector p{values, true};
  p.validate();
  return p;
}

ProbVector ProbVector::weighted(const Vec7& values) {
  ProbVector p{values, false};
  p.validate();
  return p;
}

void ProbVector::validate() const {
  if ((values.array() < 0.0).any()) {
    throw std::invalid_argument("probability vector has a negative entry");
  }
  if (normalized) {
    const double total = values.sum();
    if (std::abs(total - 1.0) > kNormalizedSumTolerance) {
      throw std::invalid_argument("normalized probability vector does not sum to one");
    }
  }
}

namespace {

constexpr CompoundPair make_pair(CompoundExpression ce, BasicEmotion first,
                                 std::int64_t n1, std::int64_t d1,
                                 BasicEmotion second, std::int64_t n2,
                                 std::int64_t d2) {
  return CompoundPair{ce, first, Fraction{n1, d1}, second, Fraction{n2, d2}};
}

}  // namespace

CompoundWeightTable CompoundWeightTable::defaults() {
  using E = BasicEmotion;
  using C = CompoundExpression;
  CompoundWeightTable table;
  table.rows_ = {
      make_pair(C::FearfullySurprised, E::Fear, 5, 7, E::Surprise, 2, 7),
      make_pair(C::HappilySurprised, E::Happiness, 6, 8, E::Surprise, 2, 8),
      make_pair(C::SadlySurprised, E::Sadness, 4, 6, E::Surprise, 2, 6),
      make_pair(C::DisgustedlySurprised, E::Disgust, 6, 8, E::Surprise, 2, 8),
      make_pair(C::AngrilySurprised, E::Anger, 5, 7, E::Surprise, 2, 7),
      make_pair(C::SadlyFearful, E::Sadness, 4, 9, E::Fear, 5, 9),
      make_pair(C::SadlyAngry, E::Sadness, 4, 9, E::Anger, 5, 9),
  };
  return table;
}

void CompoundWeightTable::validate() const {
  for (const auto& row : rows_) {
    // n1/d1 + n2/d2 == 1  <=>  n1*d2 + n2*d1 == d1*d2, checked exactly.
    const auto& a = row.weight_first;
    const auto& b = row.weight_second;
    if (a.den <= 0 || b.den <= 0) {
      throw std::invalid_argument("compound weight has a non-positive denominator");
    }
    if (a.num * b.den + b.num * a.den != a.den * b.den) {
      throw std::invalid_argument("compound pair weights do not sum to one");
    }
    if (row.first == row.second) {
      throw std::invalid_argument("compound pair repeats an emotion");
    }
    if (row.first == BasicEmotion::Neutral || row.second == BasicEmotion::Neutral) {
      throw std::invalid_argument("compound pair contains neutral");
    }
  }
}

CompoundWeightTable pair_sum_table() {
  CompoundWeightTable table = CompoundWeightTable::defaults();
  for (auto& row : table.rows_) {
    row.weight_first = Fraction{1, 1};
    row.weight_second = Fraction{1, 1};
  }
  return table;
}

}  // namespace emofuse

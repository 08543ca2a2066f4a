#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

namespace emofuse {

using CountMatrix = Eigen::Matrix<std::int64_t, Eigen::Dynamic, Eigen::Dynamic>;

/// Rows index the true class, columns the predicted class.
struct ConfusionMatrix {
  CountMatrix counts;
  std::vector<std::string> class_names;

  int class_count() const { return static_cast<int>(counts.rows()); }
  std::int64_t total() const { return counts.sum(); }
};

/// How classes with undefined precision or recall enter the macro average:
/// count them as zero (the challenge convention) or drop them from the mean.
enum class AbsentClassPolicy { ScoreZero, Exclude };

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predictions,
                          int class_count, std::vector<std::string> class_names = {});

Eigen::VectorXd per_class_f1(const ConfusionMatrix& matrix);
Eigen::VectorXd per_class_recall(const ConfusionMatrix& matrix);

double macro_f1(const ConfusionMatrix& matrix,
                AbsentClassPolicy policy = AbsentClassPolicy::ScoreZero);
double uar(const ConfusionMatrix& matrix,
           AbsentClassPolicy policy = AbsentClassPolicy::ScoreZero);

struct EvaluationReport {
  double macro_f1 = 0.0;
  double uar = 0.0;
  Eigen::VectorXd per_class_f1;
  Eigen::VectorXd per_class_recall;
  ConfusionMatrix confusion;
  std::int64_t frames_evaluated = 0;
};

EvaluationReport evaluate(std::span<const int> truth, std::span<const int> predictions,
                          int class_count, std::vector<std::string> class_names = {},
                          AbsentClassPolicy policy = AbsentClassPolicy::ScoreZero);

}  // namespace emofuse

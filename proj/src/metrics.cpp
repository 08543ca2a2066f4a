#include "emofuse/metrics.hpp"

#include <stdexcept>

namespace emofuse {

ConfusionMatrix confusion(std::span<const int> truth, std::span<const int> predictions,
                          int class_count, std::vector<std::string> class_names) {
  if (truth.size() != predictions.size()) {
    throw std::invalid_argument("confusion: truth and prediction lengths differ");
  }
  if (class_count < 1) throw std::invalid_argument("confusion: class_count must be >= 1");
  if (!class_names.empty() && static_cast<int>(class_names.size()) != class_count) {
    throw std::invalid_argument("confusion: class name count does not match class_count");
  }

  ConfusionMatrix matrix;
  matrix.counts = CountMatrix::Zero(class_count, class_count);
  matrix.class_names = std::move(class_names);
  for (std::size_t i = 0; i < truth.size(); ++i) {
    const int t = truth[i];
    const int p = predictions[i];
    if (t < 0 || t >= class_count || p < 0 || p >= class_count) {
      throw std::invalid_argument("confusion: label out of range at index " + std::to_string(i));
    }
    ++matrix.counts(t, p);
  }
  return matrix;
}

namespace {

void require_nonempty(const ConfusionMatrix& matrix) {
  if (matrix.counts.rows() == 0 || matrix.counts.rows() != matrix.counts.cols()) {
    throw std::invalid_argument("confusion matrix is empty or not square");
  }
}

}  // namespace

Eigen::VectorXd per_class_f1(const ConfusionMatrix& matrix) {
  require_nonempty(matrix);
  const int k = matrix.class_count();
  Eigen::VectorXd f1 = Eigen::VectorXd::Zero(k);
  for (int c = 0; c < k; ++c) {
    const double tp = static_cast<double>(matrix.counts(c, c));
    const double support = static_cast<double>(matrix.counts.row(c).sum());
    const double predicted = static_cast<double>(matrix.counts.col(c).sum());
    // Undefined precision/recall counts as zero.
    const double precision = predicted > 0 ? tp / predicted : 0.0;
    const double recall = support > 0 ? tp / support : 0.0;
    f1(c) = (precision + recall) > 0 ? 2.0 * precision * recall / (precision + recall) : 0.0;
  }
  return f1;
}

Eigen::VectorXd per_class_recall(const ConfusionMatrix& matrix) {
  require_nonempty(matrix);
  const int k = matrix.class_count();
  Eigen::VectorXd recall = Eigen::VectorXd::Zero(k);
  for (int c = 0; c < k; ++c) {
    const double support = static_cast<double>(matrix.counts.row(c).sum());
    recall(c) = support > 0 ? static_cast<double>(matrix.counts(c, c)) / support : 0.0;
  }
  return recall;
}

double macro_f1(const ConfusionMatrix& matrix, AbsentClassPolicy policy) {
  const Eigen::VectorXd f1 = per_class_f1(matrix);
  if (policy == AbsentClassPolicy::ScoreZero) return f1.mean();

  // Exclude classes with neither support nor predictions.
  double sum = 0.0;
  int included = 0;
  for (int c = 0; c < matrix.class_count(); ++c) {
    if (matrix.counts.row(c).sum() == 0 && matrix.counts.col(c).sum() == 0) continue;
    sum += f1(c);
    ++included;
  }
  if (included == 0) throw std::invalid_argument("macro_f1: no class has support or predictions");
  return sum / included;
}

double uar(const ConfusionMatrix& matrix, AbsentClassPolicy policy) {
  const Eigen::VectorXd recall = per_class_recall(matrix);
  if (policy == AbsentClassPolicy::ScoreZero) return recall.mean();

  double sum = 0.0;
  int included = 0;
  for (int c = 0; c < matrix.class_count(); ++c) {
    if (matrix.counts.row(c).sum() == 0) continue;
    sum += recall(c);
    ++included;
  }
  if (included == 0) throw std::invalid_argument("uar: no class has support");
  return sum / included;
}

EvaluationReport evaluate(std::span<const int> truth, std::span<const int> predictions,
                          int class_count, std::vector<std::string> class_names,
                          AbsentClassPolicy policy) {
  EvaluationReport report;
  report.confusion = confusion(truth, predictions, class_count, std::move(class_names));
  report.per_class_f1 = per_class_f1(report.confusion);
  report.per_class_recall = per_class_recall(report.confusion);
  report.macro_f1 = macro_f1(report.confusion, policy);
  report.uar = uar(report.confusion, policy);
  report.frames_evaluated = report.confusion.total();
  return report;
}

}  // namespace emofuse

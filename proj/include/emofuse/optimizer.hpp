#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "emofuse/fusion.hpp"
#include "emofuse/metrics.hpp"
#include "emofuse/temporal.hpp"

namespace emofuse {

enum class Metric { MacroF1, Uar };

std::string_view to_string(Metric metric);
std::optional<Metric> parse_metric(std::string_view name);

// How the second-stage model weights are searched in hierarchical mode:
// drawn jointly with each W sample, or scanned exhaustively over the grid
// after the best W is fixed.
enum class VStrategy { GridRandom, GridExhaustive };

std::string_view to_string(VStrategy strategy);
std::optional<VStrategy> parse_v_strategy(std::string_view name);

struct SearchConfig {
  int trials = 10000;
  std::uint64_t seed = 0;
  double alpha = 1.0;
  Metric metric = Metric::MacroF1;
  FusionMode mode = FusionMode::Hierarchical;
  VStrategy v_strategy = VStrategy::GridRandom;
  int threads = 0;  // 0 picks the hardware concurrency
  bool keep_trace = false;

  void validate(Eigen::Index model_count) const;
};

struct SearchResult {
  FusionParameters best_params;
  double best_score = 0.0;
  int trial_index = 0;
  // Per-trial scores of the random stage, present when keep_trace is set.
  std::optional<std::vector<std::pair<int, double>>> score_trace;
};

// Fuses every frame with the given parameters, argmaxes the basic emotion
// and scores against the dataset labels.
double evaluate_params(const FusionParameters& params, const AlignedDataset& dataset,
                       Metric metric);

// Parameters of one search trial. Trial 0 is the uniform baseline; later
// trials draw W (and V in hierarchical mode) from per-trial derived seeds,
// so any execution order reproduces the same candidates.
FusionParameters trial_parameters(const SearchConfig& cfg,
                                  const std::vector<std::string>& model_ids, int trial);

// Random search over `trials` candidates; ties resolve to the lowest trial
// index. With v_strategy grid_exhaustive the best W from the random stage
// is kept and every model-weight grid combination is scanned afterwards
// (the trace covers only the random stage).
SearchResult search(const SearchConfig& cfg, const AlignedDataset& dataset);

}  // namespace emofuse

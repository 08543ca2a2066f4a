#include "emofuse/optimizer.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <thread>

#include "emofuse/io.hpp"

namespace emofuse {

namespace {

// One candidate outcome; ordering favors higher score, then earlier index.
struct Candidate {
  double score = -1.0;
  long long index = -1;

  bool beats(const Candidate& other) const {
    if (score != other.score) return score > other.score;
    return index < other.index;
  }
};

int resolve_threads(int requested, long long work_items) {
  int threads = requested > 0 ? requested
                              : static_cast<int>(std::thread::hardware_concurrency());
  if (threads < 1) threads = 1;
  return static_cast<int>(std::min<long long>(threads, work_items));
}

// Runs fn(index) for every index in [0, count) across workers and returns
// the best candidate. Work is striped by index so the partition, and with
// it the result, does not depend on scheduling.
template <typename Fn>
Candidate parallel_argmax(long long count, int threads, Fn&& fn) {
  std::vector<Candidate> best(static_cast<std::size_t>(threads));
  std::vector<std::thread> workers;
  workers.reserve(static_cast<std::size_t>(threads));
  for (int w = 0; w < threads; ++w) {
    workers.emplace_back([&, w] {
      Candidate local;
      for (long long i = w; i < count; i += threads) {
        const Candidate candidate{fn(i), i};
        if (candidate.beats(local)) local = candidate;
      }
      best[static_cast<std::size_t>(w)] = local;
    });
  }
  for (auto& worker : workers) worker.join();
  Candidate overall;
  for (const auto& candidate : best) {
    if (candidate.beats(overall)) overall = candidate;
  }
  return overall;
}

}  // namespace

std::string_view to_string(Metric metric) {
  return metric == Metric::MacroF1 ? "macro_f1" : "uar";
}

std::optional<Metric> parse_metric(std::string_view name) {
  if (name == "macro_f1" || name == "f1") return Metric::MacroF1;
  if (name == "uar") return Metric::Uar;
  return std::nullopt;
}

std::string_view to_string(VStrategy strategy) {
  return strategy == VStrategy::GridRandom ? "grid_random" : "grid_exhaustive";
}

std::optional<VStrategy> parse_v_strategy(std::string_view name) {
  if (name == "grid_random") return VStrategy::GridRandom;
  if (name == "grid_exhaustive") return VStrategy::GridExhaustive;
  return std::nullopt;
}

void SearchConfig::validate(Eigen::Index model_count) const {
  if (trials < 1) throw std::invalid_argument("search: trials must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("search: alpha must be positive");
  if (threads < 0) throw std::invalid_argument("search: threads must be >= 0");
  if (model_count < 1) throw std::invalid_argument("search: no models");
  if (mode == FusionMode::Hierarchical && v_strategy == VStrategy::GridExhaustive &&
      model_count > 3) {
    throw std::invalid_argument(
        "search: grid_exhaustive scans 99^M combinations and is limited to M <= 3");
  }
}

double evaluate_params(const FusionParameters& params, const AlignedDataset& dataset,
                       Metric metric) {
  params.validate();
  dataset.validate();
  if (dataset.frame_count == 0) {
    throw DataError(dataset.dataset_id, 0, "", "no frames to evaluate");
  }
  if (!dataset.has_labels()) {
    throw DataError(dataset.dataset_id, 0, "", "no basic-emotion labels to score against");
  }
  if (params.model_ids != dataset.model_ids) {
    throw DataError(dataset.dataset_id, 0, "",
                    "parameter model_ids do not match the dataset streams");
  }

  const StreamMatrix fused = fuse_frames(params, dataset.streams);
  std::vector<int> predictions(static_cast<std::size_t>(fused.rows()));
  for (Eigen::Index f = 0; f < fused.rows(); ++f) {
    predictions[static_cast<std::size_t>(f)] = argmax_lowest(fused.row(f).transpose());
  }
  const ConfusionMatrix cm = confusion(dataset.labels, predictions, kEmotionCount);
  return metric == Metric::MacroF1 ? macro_f1(cm) : uar(cm);
}

FusionParameters trial_parameters(const SearchConfig& cfg,
                                  const std::vector<std::string>& model_ids, int trial) {
  if (trial == 0) return uniform_parameters(model_ids, cfg.mode);
  const auto model_count = static_cast<Eigen::Index>(model_ids.size());

  FusionParameters params;
  params.model_ids = model_ids;
  params.mode = cfg.mode;
  params.weight_matrix = sample_weight_matrix(
      derive_seed(cfg.seed, 2 * static_cast<std::uint64_t>(trial)), model_count, cfg.alpha);
  if (cfg.mode == FusionMode::Hierarchical) {
    params.model_weights = sample_model_weights(
        derive_seed(cfg.seed, 2 * static_cast<std::uint64_t>(trial) + 1), model_count);
  } else {
    params.model_weights = ModelWeights::Ones(model_count);
  }
  return params;
}

SearchResult search(const SearchConfig& cfg, const AlignedDataset& dataset) {
  dataset.validate();
  const auto model_count = static_cast<Eigen::Index>(dataset.model_ids.size());
  cfg.validate(model_count);
  if (!dataset.has_labels()) {
    throw std::invalid_argument("search: optimization requires labels");
  }

  const bool exhaustive =
      cfg.mode == FusionMode::Hierarchical && cfg.v_strategy == VStrategy::GridExhaustive;

  // Random stage. With grid_exhaustive the model weights stay at the
  // uniform baseline so this stage ranks W alone.
  std::vector<double> trace(cfg.keep_trace ? static_cast<std::size_t>(cfg.trials) : 0);
  const auto trial_score = [&](long long trial) {
    FusionParameters params = trial_parameters(cfg, dataset.model_ids, static_cast<int>(trial));
    if (exhaustive) params.model_weights = ModelWeights::Constant(model_count, 0.5);
    const double score = evaluate_params(params, dataset, cfg.metric);
    if (cfg.keep_trace) trace[static_cast<std::size_t>(trial)] = score;
    return score;
  };
  const int threads = resolve_threads(cfg.threads, cfg.trials);
  const Candidate best_trial = parallel_argmax(cfg.trials, threads, trial_score);

  SearchResult result;
  result.trial_index = static_cast<int>(best_trial.index);
  result.best_params = trial_parameters(cfg, dataset.model_ids, result.trial_index);
  result.best_score = best_trial.score;
  if (cfg.keep_trace) {
    result.score_trace.emplace();
    result.score_trace->reserve(trace.size());
    for (int t = 0; t < cfg.trials; ++t) result.score_trace->emplace_back(t, trace[static_cast<std::size_t>(t)]);
  }

  if (exhaustive) {
    // Second stage: fix the winning W and scan every grid combination of
    // model weights, first model's digit moving slowest.
    long long combos = 1;
    for (Eigen::Index m = 0; m < model_count; ++m) combos *= kModelWeightGridSize;
    FusionParameters base = result.best_params;
    base.model_weights = ModelWeights::Constant(model_count, 0.5);

    const auto combo_weights = [&](long long combo) {
      ModelWeights v(model_count);
      long long remainder = combo;
      for (Eigen::Index m = model_count - 1; m >= 0; --m) {
        v(m) = model_weight_grid_value(static_cast<int>(remainder % kModelWeightGridSize));
        remainder /= kModelWeightGridSize;
      }
      return v;
    };
    const auto combo_score = [&](long long combo) {
      FusionParameters params = base;
      params.model_weights = combo_weights(combo);
      return evaluate_params(params, dataset, cfg.metric);
    };
    const Candidate best_combo =
        parallel_argmax(combos, resolve_threads(cfg.threads, combos), combo_score);
    result.best_params.model_weights = combo_weights(best_combo.index);
    result.best_score = best_combo.score;
  }

  return result;
}

}  // namespace emofuse

#include <doctest.h>

#include <random>
#include <stdexcept>
#include <vector>

#include "emofuse/io.hpp"
#include "emofuse/optimizer.hpp"
#include "helpers.hpp"

using namespace emofuse;

namespace {

AlignedDataset random_dataset(int models, Eigen::Index frames, std::uint64_t seed) {
  AlignedDataset data;
  data.dataset_id = "random";
  data.frame_count = frames;
  data.fps = 5.0;
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cls(0, kEmotionCount - 1);
  for (int m = 0; m < models; ++m) {
    data.model_ids.push_back("m" + std::to_string(m));
    StreamMatrix stream(frames, kEmotionCount);
    for (Eigen::Index f = 0; f < frames; ++f) {
      stream.row(f) = testutil::random_simplex(rng).transpose();
    }
    data.streams.push_back(std::move(stream));
  }
  data.labels.resize(static_cast<std::size_t>(frames));
  for (auto& label : data.labels) label = cls(rng);
  return data;
}

// A dataset one of whose models is the ground truth, one-hot per frame.
AlignedDataset oracle_dataset(Eigen::Index frames, std::uint64_t seed) {
  AlignedDataset data = random_dataset(2, frames, seed);
  data.dataset_id = "oracle";
  for (Eigen::Index f = 0; f < frames; ++f) {
    data.streams[0].row(f) =
        testutil::one_hot(static_cast<BasicEmotion>(data.labels[static_cast<std::size_t>(f)]))
            .transpose();
  }
  return data;
}

double scalar_macro_f1(const std::vector<int>& truth, const std::vector<int>& pred) {
  double total = 0.0;
  for (int k = 0; k < kEmotionCount; ++k) {
    long tp = 0, fp = 0, fn = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
      if (truth[i] == k && pred[i] == k) ++tp;
      if (truth[i] != k && pred[i] == k) ++fp;
      if (truth[i] == k && pred[i] != k) ++fn;
    }
    const double precision = (tp + fp) > 0 ? double(tp) / double(tp + fp) : 0.0;
    const double recall = (tp + fn) > 0 ? double(tp) / double(tp + fn) : 0.0;
    if (precision + recall > 0.0) total += 2.0 * precision * recall / (precision + recall);
  }
  return total / kEmotionCount;
}

}  // namespace

TEST_CASE("metric and strategy names parse") {
  CHECK(parse_metric("macro_f1") == Metric::MacroF1);
  CHECK(parse_metric("f1") == Metric::MacroF1);
  CHECK(parse_metric("uar") == Metric::Uar);
  CHECK_FALSE(parse_metric("accuracy").has_value());
  CHECK(to_string(Metric::MacroF1) == "macro_f1");
  CHECK(to_string(Metric::Uar) == "uar");

  CHECK(parse_v_strategy("grid_random") == VStrategy::GridRandom);
  CHECK(parse_v_strategy("grid_exhaustive") == VStrategy::GridExhaustive);
  CHECK_FALSE(parse_v_strategy("anneal").has_value());
}

TEST_CASE("a model that copies the labels scores one") {
  const AlignedDataset data = oracle_dataset(120, 301);

  // Give the oracle model all the weight.
  FusionParameters params;
  params.model_ids = data.model_ids;
  params.mode = FusionMode::Dirichlet;
  params.weight_matrix.resize(2, kEmotionCount);
  params.weight_matrix.row(0).setConstant(1.0);
  params.weight_matrix.row(1).setConstant(0.0);
  params.model_weights = ModelWeights::Ones(2);

  CHECK(evaluate_params(params, data, Metric::MacroF1) == 1.0);
  CHECK(evaluate_params(params, data, Metric::Uar) == 1.0);
}

TEST_CASE("evaluation guards its inputs") {
  AlignedDataset data = random_dataset(2, 50, 303);
  const auto params = uniform_parameters(data.model_ids, FusionMode::Dirichlet);

  SUBCASE("no frames") {
    AlignedDataset empty = data;
    empty.frame_count = 0;
    empty.streams[0].resize(0, kEmotionCount);
    empty.streams[1].resize(0, kEmotionCount);
    empty.labels.clear();
    CHECK_THROWS_AS(evaluate_params(params, empty, Metric::MacroF1), DataError);
  }
  SUBCASE("no labels") {
    data.labels.clear();
    CHECK_THROWS_AS(evaluate_params(params, data, Metric::MacroF1), DataError);
  }
  SUBCASE("mismatched model ids") {
    auto renamed = uniform_parameters({"x", "y"}, FusionMode::Dirichlet);
    CHECK_THROWS_AS(evaluate_params(renamed, data, Metric::MacroF1), DataError);
  }
}

TEST_CASE("evaluation matches a scalar reimplementation of the pipeline") {
  const AlignedDataset data = random_dataset(3, 80, 307);
  std::mt19937_64 rng(309);

  for (int round = 0; round < 5; ++round) {
    FusionParameters params;
    params.model_ids = data.model_ids;
    params.mode = FusionMode::Hierarchical;
    params.weight_matrix = testutil::random_column_stochastic(rng, 3);
    params.model_weights = sample_model_weights(derive_seed(311, round), 3);

    std::vector<int> predictions;
    for (Eigen::Index f = 0; f < data.frame_count; ++f) {
      double best_value = -1.0;
      int best_class = 0;
      for (int c = 0; c < kEmotionCount; ++c) {
        double fused = 0.0;
        for (int m = 0; m < 3; ++m) {
          fused += params.model_weights(m) * params.weight_matrix(m, c) * data.streams[m](f, c);
        }
        if (fused > best_value) {
          best_value = fused;
          best_class = c;
        }
      }
      predictions.push_back(best_class);
    }
    const double expected = scalar_macro_f1(data.labels, predictions);
    CHECK(evaluate_params(params, data, Metric::MacroF1) ==
          doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("trial zero is the uniform baseline") {
  SearchConfig cfg;
  cfg.mode = FusionMode::Hierarchical;
  const std::vector<std::string> ids = {"a", "b", "c"};

  const auto baseline = trial_parameters(cfg, ids, 0);
  CHECK((baseline.weight_matrix.array() == 1.0 / 3).all());
  CHECK((baseline.model_weights.array() == 0.5).all());

  SearchConfig dirichlet = cfg;
  dirichlet.mode = FusionMode::Dirichlet;
  const auto plain = trial_parameters(dirichlet, ids, 0);
  CHECK((plain.model_weights.array() == 1.0).all());
}

TEST_CASE("later trials draw valid parameters reproducibly") {
  SearchConfig cfg;
  cfg.seed = 17;
  cfg.mode = FusionMode::Hierarchical;
  const std::vector<std::string> ids = {"a", "b", "c", "d"};

  for (int trial : {1, 2, 57}) {
    const auto params = trial_parameters(cfg, ids, trial);
    CHECK_NOTHROW(params.validate());
    const auto again = trial_parameters(cfg, ids, trial);
    CHECK((params.weight_matrix.array() == again.weight_matrix.array()).all());
    CHECK((params.model_weights.array() == again.model_weights.array()).all());
  }

  // Distinct trials draw distinct weights.
  const auto p1 = trial_parameters(cfg, ids, 1);
  const auto p2 = trial_parameters(cfg, ids, 2);
  CHECK_FALSE((p1.weight_matrix.array() == p2.weight_matrix.array()).all());

  SearchConfig dirichlet = cfg;
  dirichlet.mode = FusionMode::Dirichlet;
  const auto plain = trial_parameters(dirichlet, ids, 5);
  CHECK((plain.model_weights.array() == 1.0).all());
  CHECK_NOTHROW(plain.validate());
}

TEST_CASE("search config validation") {
  SearchConfig cfg;
  CHECK_NOTHROW(cfg.validate(3));

  SearchConfig bad = cfg;
  bad.trials = 0;
  CHECK_THROWS_AS(bad.validate(3), std::invalid_argument);
  bad = cfg;
  bad.alpha = 0.0;
  CHECK_THROWS_AS(bad.validate(3), std::invalid_argument);
  bad = cfg;
  bad.threads = -1;
  CHECK_THROWS_AS(bad.validate(3), std::invalid_argument);
  CHECK_THROWS_AS(cfg.validate(0), std::invalid_argument);

  SearchConfig exhaustive = cfg;
  exhaustive.mode = FusionMode::Hierarchical;
  exhaustive.v_strategy = VStrategy::GridExhaustive;
  CHECK_NOTHROW(exhaustive.validate(3));
  CHECK_THROWS_AS(exhaustive.validate(4), std::invalid_argument);
}

TEST_CASE("search returns the best candidate it visited") {
  const AlignedDataset data = random_dataset(3, 150, 313);
  SearchConfig cfg;
  cfg.trials = 40;
  cfg.seed = 19;
  cfg.keep_trace = true;

  const SearchResult result = search(cfg, data);

  // The reported score is the re-evaluable score of the reported params.
  CHECK(evaluate_params(result.best_params, data, cfg.metric) == result.best_score);

  // The baseline is never beaten by reporting; it is trial 0.
  const double baseline =
      evaluate_params(trial_parameters(cfg, data.model_ids, 0), data, cfg.metric);
  CHECK(result.best_score >= baseline);

  // The trace has one entry per trial and the winner is its argmax with
  // ties resolved to the lowest trial.
  REQUIRE(result.score_trace.has_value());
  REQUIRE(result.score_trace->size() == 40);
  int expected_trial = 0;
  double expected_score = -1.0;
  for (const auto& [trial, score] : *result.score_trace) {
    CHECK(score >= 0.0);
    CHECK(score <= 1.0);
    if (score > expected_score) {
      expected_score = score;
      expected_trial = trial;
    }
  }
  CHECK(result.trial_index == expected_trial);
  CHECK(result.best_score == expected_score);
  CHECK((*result.score_trace)[static_cast<std::size_t>(result.trial_index)].second ==
        result.best_score);
}

TEST_CASE("search is deterministic and thread-count invariant") {
  const AlignedDataset data = random_dataset(3, 100, 317);
  SearchConfig cfg;
  cfg.trials = 30;
  cfg.seed = 23;

  SearchConfig one_thread = cfg;
  one_thread.threads = 1;
  SearchConfig four_threads = cfg;
  four_threads.threads = 4;

  const SearchResult a = search(one_thread, data);
  const SearchResult b = search(four_threads, data);
  const SearchResult c = search(one_thread, data);

  CHECK(a.trial_index == b.trial_index);
  CHECK(a.best_score == b.best_score);
  CHECK((a.best_params.weight_matrix.array() == b.best_params.weight_matrix.array()).all());
  CHECK((a.best_params.model_weights.array() == b.best_params.model_weights.array()).all());

  CHECK(a.trial_index == c.trial_index);
  CHECK(a.best_score == c.best_score);
  CHECK((a.best_params.weight_matrix.array() == c.best_params.weight_matrix.array()).all());
}

TEST_CASE("ties resolve to the lowest trial index") {
  // With a single model every weight matrix collapses to all-ones and the
  // importance weight only rescales the fused vector, so every trial ties.
  const AlignedDataset data = random_dataset(1, 60, 331);
  SearchConfig cfg;
  cfg.trials = 25;
  cfg.seed = 29;
  cfg.threads = 4;

  const SearchResult result = search(cfg, data);
  CHECK(result.trial_index == 0);
}

TEST_CASE("search requires labels") {
  AlignedDataset data = random_dataset(2, 40, 337);
  data.labels.clear();
  SearchConfig cfg;
  cfg.trials = 3;
  CHECK_THROWS_AS(search(cfg, data), std::invalid_argument);
}

TEST_CASE("trials=1 returns the uniform baseline") {
  const AlignedDataset data = random_dataset(2, 60, 339);
  SearchConfig cfg;
  cfg.trials = 1;
  const SearchResult result = search(cfg, data);
  CHECK(result.trial_index == 0);
  CHECK((result.best_params.weight_matrix.array() == 0.5).all());
  CHECK(result.best_score ==
        evaluate_params(trial_parameters(cfg, data.model_ids, 0), data, cfg.metric));
}

TEST_CASE("exhaustive grid search fixes W and scans the model weights") {
  const AlignedDataset data = random_dataset(2, 50, 341);
  SearchConfig cfg;
  cfg.trials = 8;
  cfg.seed = 31;
  cfg.mode = FusionMode::Hierarchical;
  cfg.v_strategy = VStrategy::GridExhaustive;

  const SearchResult result = search(cfg, data);
  CHECK_NOTHROW(result.best_params.validate());
  for (Eigen::Index m = 0; m < result.best_params.model_weights.size(); ++m) {
    CHECK(on_model_weight_grid(result.best_params.model_weights(m)));
  }

  // The scan includes the pinned half-weight point, so it can only improve
  // on the random stage.
  FusionParameters pinned = result.best_params;
  pinned.model_weights = ModelWeights::Constant(2, 0.5);
  CHECK(result.best_score >= evaluate_params(pinned, data, cfg.metric));
  CHECK(result.best_score == evaluate_params(result.best_params, data, cfg.metric));
}

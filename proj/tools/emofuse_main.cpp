#include <cstdio>
#include <cstdlib>
#include <exception>
#include <filesystem>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "emofuse/io.hpp"
#include "emofuse/optimizer.hpp"
#include "emofuse/rules.hpp"
#include "emofuse/synthetic.hpp"

namespace {

using namespace emofuse;

enum class LogLevel { Debug = 0, Info, Warn, Error };

LogLevel g_log_level = LogLevel::Info;

LogLevel parse_log_level(const std::string& name) {
  if (name == "debug") return LogLevel::Debug;
  if (name == "info") return LogLevel::Info;
  if (name == "warn") return LogLevel::Warn;
  if (name == "error") return LogLevel::Error;
  throw CLI::ValidationError("--log-level", "expected debug|info|warn|error");
}

void log_line(LogLevel level, const std::string& message) {
  static constexpr const char* kTags[] = {"debug", "info", "warn", "error"};
  if (level < g_log_level) return;
  std::fprintf(stderr, "[%s] %s\n", kTags[static_cast<int>(level)], message.c_str());
}

struct GlobalOptions {
  std::uint64_t seed = 0;
  bool seed_set = false;
};

struct SynthOptions {
  std::string preset;
  std::string profile_path;
  std::string out_dir;
  Eigen::Index frames = 0;
};

void run_synth(const GlobalOptions& global, const SynthOptions& opt) {
  SyntheticProfile profile;
  if (!opt.profile_path.empty()) {
    profile = read_profile(opt.profile_path);
  } else if (!opt.preset.empty()) {
    profile = preset_profile(opt.preset);
  } else {
    throw std::invalid_argument("synth: pass --preset or --profile");
  }
  if (global.seed_set) profile.seed = global.seed;
  if (opt.frames > 0) profile.frame_count = opt.frames;
  profile.validate();

  const SyntheticDataset dataset = generate_synthetic(profile);
  const auto manifest_path = write_synthetic(dataset, opt.out_dir);
  log_line(LogLevel::Info, "dataset '" + profile.dataset_id + "': " +
                               std::to_string(profile.frame_count) + " frames, " +
                               std::to_string(profile.models.size()) + " models, " +
                               std::to_string(dataset.segments.size()) + " segments");
  std::printf("%s\n", manifest_path.string().c_str());
}

struct OptimizeOptions {
  std::string manifest_path;
  std::string out_path;
  std::string mode = "hierarchical";
  std::string metric = "macro_f1";
  std::string v_strategy = "grid_random";
  int trials = 10000;
  double alpha = 1.0;
  int threads = 0;
};

void run_optimize(const GlobalOptions& global, const OptimizeOptions& opt) {
  SearchConfig cfg;
  cfg.trials = opt.trials;
  cfg.seed = global.seed;
  cfg.alpha = opt.alpha;
  cfg.threads = opt.threads;
  const auto metric = parse_metric(opt.metric);
  if (!metric) throw std::invalid_argument("optimize: unknown metric '" + opt.metric + "'");
  cfg.metric = *metric;
  const auto mode = parse_fusion_mode(opt.mode);
  if (!mode) throw std::invalid_argument("optimize: unknown mode '" + opt.mode + "'");
  cfg.mode = *mode;
  const auto strategy = parse_v_strategy(opt.v_strategy);
  if (!strategy) {
    throw std::invalid_argument("optimize: unknown v-strategy '" + opt.v_strategy + "'");
  }
  cfg.v_strategy = *strategy;

  const DatasetManifest manifest = read_manifest(opt.manifest_path);
  if (!manifest.labels || manifest.labels->task != LabelTask::Basic) {
    throw std::invalid_argument("optimize: optimization requires labels");
  }
  const AlignedDataset dataset =
      load_aligned_dataset(manifest, std::filesystem::path(opt.manifest_path).parent_path());

  const SearchResult result = search(cfg, dataset);

  WeightsFile weights;
  weights.model_ids = result.best_params.model_ids;
  weights.mode = result.best_params.mode;
  weights.weight_matrix = result.best_params.weight_matrix;
  weights.model_weights = result.best_params.model_weights;
  weights.provenance = {cfg.seed, cfg.trials, std::string(to_string(cfg.metric)),
                        dataset.dataset_id, result.best_score};
  write_weights(opt.out_path, weights);

  std::printf("best %s=%.2f (trial %d of %d)\n", std::string(to_string(cfg.metric)).c_str(),
              result.best_score * 100.0, result.trial_index, cfg.trials);
}

struct PredictOptions {
  std::string manifest_path;
  std::string weights_path;
  std::string out_path;
  std::string rule = "2";
  std::string diagnostics_path;
  std::string basic_out_path;
  double mask_threshold = 1.0 / kEmotionCount;
  std::string all_masked_policy = "use_unmasked";
};

void run_predict(const PredictOptions& opt) {
  const auto rule = parse_rule(opt.rule);
  if (!rule) throw std::invalid_argument("predict: unknown rule '" + opt.rule + "'");

  RuleConfig config;
  config.rule = *rule;
  config.mask_threshold = opt.mask_threshold;
  if (opt.all_masked_policy == "use_unmasked") {
    config.all_masked_policy = AllMaskedPolicy::UseUnmasked;
  } else if (opt.all_masked_policy == "first_class") {
    config.all_masked_policy = AllMaskedPolicy::FirstClass;
  } else {
    throw std::invalid_argument("predict: unknown all-masked policy '" + opt.all_masked_policy +
                                "'");
  }
  config.validate();

  const WeightsFile weights = read_weights(opt.weights_path);
  if (config.rule == Rule::Rule1 && weights.mode != FusionMode::Dirichlet) {
    throw std::invalid_argument(
        "predict: rule 1 applies only to dirichlet-mode weights; retrain or pick rule 2");
  }

  const DatasetManifest manifest = read_manifest(opt.manifest_path);
  const AlignedDataset dataset =
      load_aligned_dataset(manifest, std::filesystem::path(opt.manifest_path).parent_path());
  const FusionParameters params = weights.to_parameters();
  if (params.model_ids != dataset.model_ids) {
    throw std::invalid_argument("predict: weights were trained on different model streams");
  }

  const StreamMatrix fused = fuse_frames(params, dataset.streams);
  std::vector<FramePrediction> predictions(static_cast<std::size_t>(fused.rows()));
  std::vector<DiagnosticEvent> events;
  for (Eigen::Index f = 0; f < fused.rows(); ++f) {
    const auto prediction = predict_ce(ProbVector::weighted(fused.row(f)), config);
    predictions[static_cast<std::size_t>(f)] = prediction;
    if (prediction.all_masked) events.push_back({f, "all_masked"});
    if (prediction.neutral_dominant) events.push_back({f, "neutral_dominant"});
  }

  write_compound_predictions(opt.out_path, predictions);
  if (!opt.diagnostics_path.empty()) write_diagnostics(opt.diagnostics_path, events);
  if (!opt.basic_out_path.empty()) {
    std::vector<int> decisions(static_cast<std::size_t>(fused.rows()));
    for (Eigen::Index f = 0; f < fused.rows(); ++f) {
      decisions[static_cast<std::size_t>(f)] = argmax_lowest(fused.row(f));
    }
    write_basic_predictions(opt.basic_out_path, decisions, fused);
  }
  log_line(LogLevel::Info,
           "predicted " + std::to_string(fused.rows()) + " frames, " +
               std::to_string(events.size()) + " diagnostic events");
}

struct EvalOptions {
  std::string pred_path;
  std::string labels_path;
  std::string task = "compound";
  std::string report_path;
};

void run_eval(const EvalOptions& opt) {
  const auto task = parse_label_task(opt.task);
  if (!task) throw std::invalid_argument("eval: unknown task '" + opt.task + "'");

  const PredictionRows predictions = read_predictions(opt.pred_path, *task);
  const auto labels = read_labels(opt.labels_path, *task);
  if (labels.empty()) throw std::invalid_argument("eval: label file has no rows");

  std::vector<int> truth;
  std::vector<int> predicted;
  std::size_t cursor = 0;
  for (const auto& row : labels) {
    while (cursor < predictions.frames.size() && predictions.frames[cursor] < row.frame) ++cursor;
    if (cursor == predictions.frames.size() || predictions.frames[cursor] != row.frame) {
      throw std::invalid_argument("eval: predictions do not cover label frame " +
                                  std::to_string(row.frame));
    }
    truth.push_back(row.label);
    predicted.push_back(predictions.decisions[cursor]);
  }

  std::vector<std::string> names;
  if (*task == LabelTask::Basic) {
    names.assign(kEmotionNames.begin(), kEmotionNames.end());
  } else {
    names.assign(kCompoundNames.begin(), kCompoundNames.end());
  }
  const EvaluationReport report = evaluate(truth, predicted, kEmotionCount, names);

  if (!opt.report_path.empty()) write_report(opt.report_path, report, *task);
  std::printf("frames=%lld\nmacro_f1=%.2f\nuar=%.2f\n",
              static_cast<long long>(report.frames_evaluated), report.macro_f1 * 100.0,
              report.uar * 100.0);
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Late fusion of frame-level emotion probability streams"};
  app.require_subcommand(1);
  app.fallthrough();

  GlobalOptions global;
  std::string log_level = "info";
  if (const char* env = std::getenv("EMOFUSE_LOG_LEVEL")) log_level = env;
  auto* seed_opt = app.add_option("--seed", global.seed, "Root random seed");
  app.add_option("--log-level", log_level, "debug|info|warn|error");

  SynthOptions synth;
  auto* cmd_synth = app.add_subcommand("synth", "Generate a synthetic dataset");
  auto* preset_opt =
      cmd_synth->add_option("--preset", synth.preset, "three-model-default|audio-advantage");
  cmd_synth->add_option("--profile", synth.profile_path, "Profile JSON file")
      ->excludes(preset_opt);
  cmd_synth->add_option("--out", synth.out_dir, "Output directory")->required();
  cmd_synth->add_option("--frames", synth.frames, "Override the profile frame count");

  OptimizeOptions optimize;
  auto* cmd_optimize = app.add_subcommand("optimize", "Search fusion weights on labeled data");
  cmd_optimize->add_option("--manifest", optimize.manifest_path, "Dataset manifest")->required();
  cmd_optimize->add_option("--out", optimize.out_path, "Weights file to write")->required();
  cmd_optimize->add_option("--mode", optimize.mode, "dirichlet|hierarchical");
  cmd_optimize->add_option("--trials", optimize.trials, "Random search trials");
  cmd_optimize->add_option("--metric", optimize.metric, "f1|uar");
  cmd_optimize->add_option("--v-strategy", optimize.v_strategy, "grid_random|grid_exhaustive");
  cmd_optimize->add_option("--alpha", optimize.alpha, "Dirichlet concentration");
  cmd_optimize->add_option("--threads", optimize.threads, "Worker threads (0 = auto)");

  PredictOptions predict;
  auto* cmd_predict = app.add_subcommand("predict", "Fuse streams and predict compound classes");
  cmd_predict->add_option("--manifest", predict.manifest_path, "Dataset manifest")->required();
  cmd_predict->add_option("--weights", predict.weights_path, "Weights file")->required();
  cmd_predict->add_option("--out", predict.out_path, "Predictions file to write")->required();
  cmd_predict->add_option("--rule", predict.rule, "1|2|none");
  cmd_predict->add_option("--diagnostics", predict.diagnostics_path,
                          "Write masked/neutral frame events here");
  cmd_predict->add_option("--basic-out", predict.basic_out_path,
                          "Also write per-frame basic-emotion predictions");
  cmd_predict->add_option("--mask-threshold", predict.mask_threshold,
                          "Masking threshold for rule 1");
  cmd_predict->add_option("--all-masked-policy", predict.all_masked_policy,
                          "use_unmasked|first_class");

  EvalOptions eval;
  auto* cmd_eval = app.add_subcommand("eval", "Score predictions against labels");
  cmd_eval->add_option("--pred", eval.pred_path, "Predictions file")->required();
  cmd_eval->add_option("--labels", eval.labels_path, "Labels file")->required();
  cmd_eval->add_option("--task", eval.task, "basic|compound");
  cmd_eval->add_option("--report", eval.report_path, "Write the JSON report here");

  try {
    app.parse(argc, argv);
    g_log_level = parse_log_level(log_level);
    global.seed_set = seed_opt->count() > 0;

    if (cmd_synth->parsed()) run_synth(global, synth);
    if (cmd_optimize->parsed()) run_optimize(global, optimize);
    if (cmd_predict->parsed()) run_predict(predict);
    if (cmd_eval->parsed()) run_eval(eval);
    return 0;
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  } catch (const DataError& e) {
    log_line(LogLevel::Error, e.what());
    return 3;
  } catch (const std::invalid_argument& e) {
    log_line(LogLevel::Error, e.what());
    return 2;
  } catch (const std::exception& e) {
    log_line(LogLevel::Error, e.what());
    return 3;
  }
}

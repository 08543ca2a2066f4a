#include "emofuse/synthetic.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <random>
#include <stdexcept>

#include <json.hpp>

#include "emofuse/fusion.hpp"

namespace emofuse {

namespace {

using nlohmann::json;

// Seed streams, one per independently drawn part of the dataset.
constexpr std::uint64_t kTruthStream = 0x74727574682d7365ULL;
constexpr std::uint64_t kModelStreamBase = 0x73796e74682d6d00ULL;

ConfusionProfile spread_confusion(double diagonal) {
  const double off = (1.0 - diagonal) / (kEmotionCount - 1);
  ConfusionProfile confusion = ConfusionProfile::Constant(off);
  confusion.diagonal().setConstant(diagonal);
  return confusion;
}

// Overwrites one confusion row: named entries first, remainder spread
// uniformly over the classes not mentioned.
void set_row(ConfusionProfile& confusion, BasicEmotion truth,
             std::initializer_list<std::pair<BasicEmotion, double>> entries) {
  Eigen::Matrix<double, kEmotionCount, 1> row = Eigen::Matrix<double, kEmotionCount, 1>::Zero();
  double assigned = 0.0;
  for (const auto& [emotion, mass] : entries) {
    row(static_cast<int>(emotion)) = mass;
    assigned += mass;
  }
  const double rest = (1.0 - assigned) / (kEmotionCount - static_cast<int>(entries.size()));
  for (int c = 0; c < kEmotionCount; ++c) {
    if (row(c) == 0.0) row(c) = rest;
  }
  confusion.row(static_cast<int>(truth)) = row.transpose();
}

Vec7 sample_around(const Eigen::Matrix<double, 1, kEmotionCount>& mean, double concentration,
                   std::mt19937_64& rng) {
  Vec7 sample;
  double total = 0.0;
  for (int c = 0; c < kEmotionCount; ++c) {
    const double alpha = concentration * mean(c);
    if (alpha > 0.0) {
      std::gamma_distribution<double> gamma(alpha, 1.0);
      sample(c) = gamma(rng);
    } else {
      sample(c) = 0.0;
    }
    total += sample(c);
  }
  if (total <= 0.0) return mean.transpose();
  return sample / total;
}

int per_frame_stride(const SyntheticModelProfile& model, double fps) {
  const double ratio = model.spec.effective_fps() / fps;
  const long long stride = std::llround(ratio);
  if (stride < 1 || std::abs(ratio - static_cast<double>(stride)) > 1e-9) {
    throw std::invalid_argument("synthetic profile: model '" + model.model_id +
                                "' effective fps must be an integer multiple of dataset fps");
  }
  return static_cast<int>(stride);
}

json confusion_to_json(const ConfusionProfile& confusion) {
  json rows = json::array();
  for (int r = 0; r < kEmotionCount; ++r) {
    json row = json::array();
    for (int c = 0; c < kEmotionCount; ++c) row.push_back(confusion(r, c));
    rows.push_back(std::move(row));
  }
  return rows;
}

}  // namespace

void SyntheticModelProfile::validate() const {
  if (model_id.empty()) throw std::invalid_argument("synthetic profile: empty model_id");
  spec.validate();
  if (class_count != 7 && class_count != 8) {
    throw std::invalid_argument("synthetic profile: class_count must be 7 or 8");
  }
  if (class_count == 7 && extra_mass != 0.0) {
    throw std::invalid_argument("synthetic profile: extra_mass requires class_count 8");
  }
  if (extra_mass < 0.0 || extra_mass >= 1.0) {
    throw std::invalid_argument("synthetic profile: extra_mass must lie in [0, 1)");
  }
  if (!(concentration > 0.0)) {
    throw std::invalid_argument("synthetic profile: concentration must be positive");
  }
  if ((confusion.array() < 0.0).any()) {
    throw std::invalid_argument("synthetic profile: negative confusion entry");
  }
  for (int r = 0; r < kEmotionCount; ++r) {
    if (std::abs(confusion.row(r).sum() - 1.0) > 1e-9) {
      throw std::invalid_argument("synthetic profile: confusion row " + std::to_string(r) +
                                  " does not sum to 1");
    }
  }
}

void SyntheticProfile::validate() const {
  if (dataset_id.empty()) throw std::invalid_argument("synthetic profile: empty dataset_id");
  if (frame_count < 1) throw std::invalid_argument("synthetic profile: frame_count must be >= 1");
  if (!(fps > 0.0)) throw std::invalid_argument("synthetic profile: fps must be positive");
  if (min_segment_frames < 1 || max_segment_frames < min_segment_frames) {
    throw std::invalid_argument("synthetic profile: segment length range is invalid");
  }
  if (models.empty()) throw std::invalid_argument("synthetic profile: no models");
  std::vector<std::string> ids;
  for (const auto& model : models) {
    model.validate();
    if (model.spec.kind == StreamKind::PerFrame) per_frame_stride(model, fps);
    ids.push_back(model.model_id);
  }
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw std::invalid_argument("synthetic profile: duplicate model_id");
  }
}

SyntheticProfile preset_profile(const std::string& name) {
  SyntheticProfile profile;
  profile.seed = 7;
  profile.fps = 5.0;

  if (name == "three-model-default") {
    profile.dataset_id = "synth-default";
    profile.frame_count = 5000;
    profile.min_segment_frames = 10;
    profile.max_segment_frames = 50;

    // One sharp model, one confidently biased model, one near-uniform
    // model. Uniform fusion inherits the bias and the noise, so per-class
    // weighting has real headroom.
    SyntheticModelProfile vs;
    vs.model_id = "vs";
    vs.spec.kind = StreamKind::PerFrame;
    vs.spec.native_fps = 25.0;
    vs.concentration = 8.0;
    vs.confusion = spread_confusion(0.70);

    SyntheticModelProfile vd;
    vd.model_id = "vd";
    vd.spec.kind = StreamKind::PerFrame;
    vd.spec.native_fps = 5.0;
    vd.concentration = 10.0;
    vd.confusion = spread_confusion(0.55);
    set_row(vd.confusion, BasicEmotion::Anger,
            {{BasicEmotion::Anger, 0.10}, {BasicEmotion::Disgust, 0.60}});
    set_row(vd.confusion, BasicEmotion::Sadness,
            {{BasicEmotion::Sadness, 0.10}, {BasicEmotion::Surprise, 0.60}});
    set_row(vd.confusion, BasicEmotion::Surprise,
            {{BasicEmotion::Surprise, 0.10}, {BasicEmotion::Sadness, 0.60}});

    SyntheticModelProfile w2v2;
    w2v2.model_id = "w2v2";
    w2v2.spec.kind = StreamKind::Windowed;
    w2v2.spec.window_seconds = 4.0;
    w2v2.spec.step_seconds = 2.0;
    w2v2.class_count = 8;
    w2v2.extra_mass = 0.08;
    w2v2.concentration = 4.0;
    w2v2.confusion = spread_confusion(0.16);

    profile.models = {vs, vd, w2v2};
    return profile;
  }

  if (name == "audio-advantage") {
    profile.dataset_id = "synth-audio";
    profile.frame_count = 3000;
    profile.min_segment_frames = 20;
    profile.max_segment_frames = 60;

    SyntheticModelProfile vs;
    vs.model_id = "vs";
    vs.spec.kind = StreamKind::PerFrame;
    vs.spec.native_fps = 5.0;
    vs.concentration = 10.0;
    vs.confusion = spread_confusion(0.70);
    set_row(vs.confusion, BasicEmotion::Anger,
            {{BasicEmotion::Anger, 0.10}, {BasicEmotion::Disgust, 0.50}});
    set_row(vs.confusion, BasicEmotion::Sadness,
            {{BasicEmotion::Sadness, 0.10}, {BasicEmotion::Neutral, 0.50}});

    SyntheticModelProfile vd;
    vd.model_id = "vd";
    vd.spec.kind = StreamKind::PerFrame;
    vd.spec.native_fps = 5.0;
    vd.concentration = 10.0;
    vd.confusion = spread_confusion(0.65);
    set_row(vd.confusion, BasicEmotion::Anger,
            {{BasicEmotion::Anger, 0.10}, {BasicEmotion::Fear, 0.48}});
    set_row(vd.confusion, BasicEmotion::Sadness,
            {{BasicEmotion::Sadness, 0.12}, {BasicEmotion::Neutral, 0.46}});

    SyntheticModelProfile audio;
    audio.model_id = "audio";
    audio.spec.kind = StreamKind::Windowed;
    audio.spec.window_seconds = 4.0;
    audio.spec.step_seconds = 2.0;
    audio.concentration = 12.0;
    audio.confusion = spread_confusion(1.0 / kEmotionCount);
    audio.confusion.diagonal().setConstant(1.0 / kEmotionCount);
    set_row(audio.confusion, BasicEmotion::Anger, {{BasicEmotion::Anger, 0.90}});
    set_row(audio.confusion, BasicEmotion::Sadness, {{BasicEmotion::Sadness, 0.90}});

    profile.models = {vs, vd, audio};
    return profile;
  }

  throw std::invalid_argument("unknown preset '" + name + "'");
}

std::vector<std::string> preset_names() { return {"three-model-default", "audio-advantage"}; }

SyntheticProfile read_profile(const std::filesystem::path& path) {
  std::ifstream input(path);
  if (!input) throw DataError(path.string(), 0, "", "cannot open file for reading");
  json root;
  try {
    input >> root;
  } catch (const json::exception& error) {
    throw DataError(path.string(), 0, "", std::string("invalid JSON: ") + error.what());
  }

  SyntheticProfile profile;
  try {
    profile.dataset_id = root.at("dataset_id").get<std::string>();
    profile.seed = root.value("seed", std::uint64_t{7});
    profile.frame_count = root.at("frame_count").get<Eigen::Index>();
    profile.fps = root.at("fps").get<double>();
    if (root.contains("segment_frames")) {
      profile.min_segment_frames = root.at("segment_frames").at("min").get<int>();
      profile.max_segment_frames = root.at("segment_frames").at("max").get<int>();
    }
    for (const auto& entry : root.at("models")) {
      SyntheticModelProfile model;
      model.model_id = entry.at("model_id").get<std::string>();
      const auto kind = parse_stream_kind(entry.at("kind").get<std::string>());
      if (!kind) throw DataError(path.string(), 0, "kind", "unknown stream kind");
      model.spec.kind = *kind;
      if (model.spec.kind == StreamKind::PerFrame) {
        model.spec.native_fps = entry.at("native_fps").get<double>();
        model.spec.frame_sampling_step = entry.value("frame_sampling_step", 1);
      } else {
        model.spec.window_seconds = entry.at("window_seconds").get<double>();
        model.spec.step_seconds = entry.at("step_seconds").get<double>();
      }
      model.class_count = entry.value("class_count", 7);
      model.extra_column = entry.value("extra_column", std::string("other"));
      model.extra_mass = entry.value("extra_mass", 0.0);
      model.concentration = entry.at("concentration").get<double>();
      const auto& rows = entry.at("confusion");
      if (rows.size() != kEmotionCount) {
        throw DataError(path.string(), 0, "confusion", "expected 7 rows");
      }
      for (int r = 0; r < kEmotionCount; ++r) {
        const auto& row = rows.at(static_cast<std::size_t>(r));
        if (row.size() != kEmotionCount) {
          throw DataError(path.string(), 0, "confusion", "expected 7 entries per row");
        }
        for (int c = 0; c < kEmotionCount; ++c) {
          model.confusion(r, c) = row.at(static_cast<std::size_t>(c)).get<double>();
        }
      }
      profile.models.push_back(std::move(model));
    }
  } catch (const json::exception& error) {
    throw DataError(path.string(), 0, "", std::string("profile field error: ") + error.what());
  }
  profile.validate();
  return profile;
}

SyntheticDataset generate_synthetic(const SyntheticProfile& profile) {
  profile.validate();
  SyntheticDataset dataset;
  dataset.profile = profile;

  std::mt19937_64 truth_rng(derive_seed(profile.seed, kTruthStream));
  std::uniform_int_distribution<int> length_dist(profile.min_segment_frames,
                                                 profile.max_segment_frames);
  std::uniform_int_distribution<int> emotion_dist(0, kEmotionCount - 1);

  std::vector<int> truth(static_cast<std::size_t>(profile.frame_count));
  Eigen::Index cursor = 0;
  int previous_emotion = -1;
  while (cursor < profile.frame_count) {
    TruthSegment segment;
    segment.start = cursor;
    segment.length = std::min<Eigen::Index>(length_dist(truth_rng), profile.frame_count - cursor);
    segment.emotion = emotion_dist(truth_rng);
    while (segment.emotion == previous_emotion) segment.emotion = emotion_dist(truth_rng);
    std::fill(truth.begin() + segment.start, truth.begin() + segment.start + segment.length,
              segment.emotion);
    previous_emotion = segment.emotion;
    cursor += segment.length;
    dataset.segments.push_back(segment);
  }

  // A segment following a partner emotion from the pair table carries the
  // matching compound label; order within the pair does not matter.
  const auto table = CompoundWeightTable::defaults();
  std::vector<Eigen::Index> ce_frames;
  std::vector<int> ce_labels;
  for (std::size_t s = 1; s < dataset.segments.size(); ++s) {
    const int a = dataset.segments[s - 1].emotion;
    const int b = dataset.segments[s].emotion;
    for (const auto& pair : table.rows()) {
      const int first = static_cast<int>(pair.first);
      const int second = static_cast<int>(pair.second);
      if ((a == first && b == second) || (a == second && b == first)) {
        const auto& segment = dataset.segments[s];
        for (Eigen::Index f = 0; f < segment.length; ++f) {
          ce_frames.push_back(segment.start + f);
          ce_labels.push_back(static_cast<int>(pair.expression));
        }
        break;
      }
    }
  }

  dataset.aligned.dataset_id = profile.dataset_id;
  dataset.aligned.frame_count = profile.frame_count;
  dataset.aligned.fps = profile.fps;
  dataset.aligned.labels = truth;
  dataset.aligned.compound_frames = std::move(ce_frames);
  dataset.aligned.compound_labels = std::move(ce_labels);

  for (std::size_t m = 0; m < profile.models.size(); ++m) {
    const auto& model = profile.models[m];
    std::mt19937_64 rng(derive_seed(profile.seed, kModelStreamBase + m));

    RawStream raw;
    raw.kind = model.spec.kind;
    std::vector<double> extra;
    if (model.spec.kind == StreamKind::PerFrame) {
      const int stride = per_frame_stride(model, profile.fps);
      const Eigen::Index native_length = profile.frame_count * stride;
      raw.frames.resize(native_length, kEmotionCount);
      for (Eigen::Index j = 0; j < native_length; ++j) {
        const auto frame = static_cast<std::size_t>(j / stride);
        raw.frames.row(j) =
            sample_around(model.confusion.row(truth[frame]), model.concentration, rng);
      }
      if (model.class_count == 8) extra.assign(static_cast<std::size_t>(native_length),
                                               model.extra_mass);
    } else {
      const double duration = static_cast<double>(profile.frame_count) / profile.fps;
      for (Eigen::Index w = 0;; ++w) {
        const double start = static_cast<double>(w) * model.spec.step_seconds;
        if (start >= duration - 1e-12) break;
        TimedWindow window;
        window.start_s = start;
        window.end_s = start + model.spec.window_seconds;
        const auto covered = frames_in_window(window.start_s, window.end_s, profile.frame_count,
                                              profile.fps);
        int label = 0;
        if (covered.empty()) {
          const auto nearest = std::clamp<Eigen::Index>(
              static_cast<Eigen::Index>(std::llround(start * profile.fps)), 0,
              profile.frame_count - 1);
          label = truth[static_cast<std::size_t>(nearest)];
        } else {
          std::vector<int> labels;
          labels.reserve(covered.size());
          for (const auto frame : covered) labels.push_back(truth[static_cast<std::size_t>(frame)]);
          label = majority_label(labels);
        }
        window.probabilities = sample_around(model.confusion.row(label), model.concentration, rng);
        raw.windows.push_back(std::move(window));
      }
      if (model.class_count == 8) extra.assign(raw.windows.size(), model.extra_mass);
    }

    StreamMatrix aligned;
    if (model.spec.kind == StreamKind::PerFrame) {
      aligned = align_frames(raw.frames, model.spec, profile.frame_count, profile.fps);
    } else {
      aligned = expand_windows(raw.windows, profile.frame_count, profile.fps);
    }
    dataset.aligned.model_ids.push_back(model.model_id);
    dataset.aligned.streams.push_back(std::move(aligned));
    dataset.raw_streams.push_back(std::move(raw));
    dataset.extra_mass.push_back(std::move(extra));
  }

  dataset.aligned.validate();
  return dataset;
}

std::filesystem::path write_synthetic(const SyntheticDataset& dataset,
                                      const std::filesystem::path& out_dir) {
  const auto& profile = dataset.profile;

  DatasetManifest manifest;
  manifest.dataset_id = profile.dataset_id;
  manifest.fps = profile.fps;
  manifest.frame_count = profile.frame_count;
  for (std::size_t m = 0; m < profile.models.size(); ++m) {
    const auto& model = profile.models[m];
    ModelEntry entry;
    entry.model_id = model.model_id;
    entry.file = "streams/" + model.model_id + ".csv";
    entry.spec = model.spec;
    entry.class_count = model.class_count;
    entry.extra_column = model.extra_column;
    manifest.models.push_back(std::move(entry));

    write_stream(out_dir / manifest.models.back().file, dataset.raw_streams[m], model.class_count,
                 model.extra_column, dataset.extra_mass[m]);
  }
  manifest.labels = LabelsEntry{"labels_basic.csv", LabelTask::Basic};

  std::vector<LabelRow> basic(static_cast<std::size_t>(profile.frame_count));
  for (Eigen::Index f = 0; f < profile.frame_count; ++f) {
    basic[static_cast<std::size_t>(f)] = {f, dataset.aligned.labels[static_cast<std::size_t>(f)]};
  }
  write_labels(out_dir / "labels_basic.csv", LabelTask::Basic, basic);

  std::vector<LabelRow> compound(dataset.aligned.compound_frames.size());
  for (std::size_t i = 0; i < compound.size(); ++i) {
    compound[i] = {dataset.aligned.compound_frames[i], dataset.aligned.compound_labels[i]};
  }
  write_labels(out_dir / "labels_ce.csv", LabelTask::Compound, compound);

  const auto manifest_path = out_dir / "manifest.json";
  write_manifest(manifest_path, manifest);
  return manifest_path;
}

}  // namespace emofuse

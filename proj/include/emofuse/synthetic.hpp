#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "emofuse/emotions.hpp"
#include "emofuse/io.hpp"
#include "emofuse/temporal.hpp"

namespace emofuse {

using ConfusionProfile = Eigen::Matrix<double, kEmotionCount, kEmotionCount>;

// Emission model for one synthetic stream. Row e of `confusion` is the mean
// probability vector the model produces when the true emotion is e; higher
// `concentration` makes emitted vectors cluster tighter around that row.
struct SyntheticModelProfile {
  std::string model_id;
  StreamSpec spec;
  int class_count = 7;
  std::string extra_column = "other";
  double extra_mass = 0.0;
  double concentration = 10.0;
  ConfusionProfile confusion = ConfusionProfile::Identity();

  void validate() const;
};

struct SyntheticProfile {
  std::string dataset_id;
  std::uint64_t seed = 0;
  Eigen::Index frame_count = 0;
  double fps = 5.0;
  int min_segment_frames = 10;
  int max_segment_frames = 50;
  std::vector<SyntheticModelProfile> models;

  void validate() const;
};

// One contiguous run of a single ground-truth emotion.
struct TruthSegment {
  Eigen::Index start = 0;
  Eigen::Index length = 0;
  int emotion = 0;
};

struct SyntheticDataset {
  SyntheticProfile profile;
  std::vector<TruthSegment> segments;
  // Streams exactly as they would appear on disk, before temporal alignment.
  std::vector<RawStream> raw_streams;
  std::vector<std::vector<double>> extra_mass;
  // The same streams aligned to the dataset frame grid, with truth attached.
  AlignedDataset aligned;
};

// Built-in profiles: "three-model-default" (one sharp visual model, one
// Sadness/Surprise-confusing model, one near-uniform 8-class model) and
// "audio-advantage" (two visual models that fail on Anger and Sadness plus
// an audio model that excels exactly there).
SyntheticProfile preset_profile(const std::string& name);
std::vector<std::string> preset_names();

SyntheticProfile read_profile(const std::filesystem::path& path);

// Draws a segment-structured ground-truth emotion sequence, then one stream
// per model whose rows are Dirichlet samples centered on the confusion row
// of the current true emotion. Deterministic for a fixed profile and seed.
SyntheticDataset generate_synthetic(const SyntheticProfile& profile);

// Writes manifest.json, streams/<model_id>.csv, labels_basic.csv and
// labels_ce.csv under out_dir; returns the manifest path. The manifest's
// labels entry points at the basic labels, the compound labels ride along
// as a separate file for evaluation.
std::filesystem::path write_synthetic(const SyntheticDataset& dataset,
                                      const std::filesystem::path& out_dir);

}  // namespace emofuse

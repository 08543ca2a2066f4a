#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include "emofuse/emotions.hpp"
#include "emofuse/fusion.hpp"
#include "emofuse/metrics.hpp"
#include "emofuse/rules.hpp"
#include "emofuse/temporal.hpp"

namespace emofuse {

/// Malformed or inconsistent input. Carries file, row and column context so
/// messages always name where parsing stopped.
class DataError : public std::runtime_error {
 public:
  DataError(std::string file, long row, std::string column, const std::string& what);

  const std::string& file() const { return file_; }
  long row() const { return row_; }
  const std::string& column() const { return column_; }

 private:
  std::string file_;
  long row_ = 0;
  std::string column_;
};

enum class LabelTask { Basic, Compound };

std::string_view to_string(LabelTask task);
std::optional<LabelTask> parse_label_task(std::string_view name);

struct ModelEntry {
  std::string model_id;
  std::string file;
  StreamSpec spec;
  int class_count = 7;              // 7 or 8; the 8th column is dropped on read
  std::string extra_column = "other";
  bool allow_upsample = false;
};

struct LabelsEntry {
  std::string file;
  LabelTask task = LabelTask::Basic;
};

/// Binds model stream files, label files and frame-grid parameters into one
/// evaluable dataset.
struct DatasetManifest {
  std::string dataset_id;
  double fps = 0.0;
  Eigen::Index frame_count = 0;
  std::vector<ModelEntry> models;
  std::optional<LabelsEntry> labels;

  void validate() const;
};

DatasetManifest read_manifest(const std::filesystem::path& path);
void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest);

/// A stream as parsed from disk, before alignment onto the frame grid.
struct RawStream {
  StreamKind kind = StreamKind::PerFrame;
  StreamMatrix frames;              // per-frame streams
  std::vector<TimedWindow> windows; // windowed streams
};

/// Parses one stream file. Eight-column inputs are reduced to seven by
/// dropping the named extra column; every row is validated as a
/// distribution within 1e-4 and renormalized exactly.
RawStream read_stream(const std::filesystem::path& path, const StreamSpec& spec,
                      int class_count, const std::string& extra_column = "other");

void write_stream(const std::filesystem::path& path, const RawStream& stream,
                  int class_count = 7, const std::string& extra_column = "other",
                  std::span<const double> extra_mass = {});

struct LabelRow {
  Eigen::Index frame = 0;
  int label = 0;
};

std::vector<LabelRow> read_labels(const std::filesystem::path& path, LabelTask task);
void write_labels(const std::filesystem::path& path, LabelTask task,
                  std::span<const LabelRow> rows);

/// Reads every stream named by the manifest and aligns it onto the frame grid.
AlignedDataset load_aligned_dataset(const DatasetManifest& manifest,
                                    const std::filesystem::path& base_dir);

/// Fusion weights plus the provenance of the search that produced them.
struct WeightsFile {
  std::vector<std::string> class_order;
  std::vector<std::string> model_ids;
  FusionMode mode = FusionMode::Dirichlet;
  WeightMatrix weight_matrix;
  ModelWeights model_weights;

  struct Provenance {
    std::uint64_t seed = 0;
    int trials = 0;
    std::string metric;
    std::string validation_dataset_id;
    double score = 0.0;
  } provenance;

  FusionParameters to_parameters() const;
};

WeightsFile read_weights(const std::filesystem::path& path);
void write_weights(const std::filesystem::path& path, const WeightsFile& weights);

struct PredictionRows {
  std::vector<Eigen::Index> frames;
  std::vector<int> decisions;  // canonical class indices for the file's taxonomy
  std::vector<Eigen::Matrix<double, Eigen::Dynamic, 1>> scores;
};

void write_compound_predictions(const std::filesystem::path& path,
                                std::span<const FramePrediction> predictions);
PredictionRows read_predictions(const std::filesystem::path& path, LabelTask task);

void write_basic_predictions(const std::filesystem::path& path, std::span<const int> decisions,
                             const StreamMatrix& fused);

struct DiagnosticEvent {
  Eigen::Index frame = 0;
  std::string event;  // all_masked | neutral_dominant
};

void write_diagnostics(const std::filesystem::path& path,
                       std::span<const DiagnosticEvent> events);

void write_report(const std::filesystem::path& path, const EvaluationReport& report,
                  LabelTask task);

}  // namespace emofuse

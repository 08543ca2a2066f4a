#include "emofuse/io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>

#include <json.hpp>

namespace emofuse {

namespace {

using nlohmann::json;

std::string compose_message(const std::string& file, long row, const std::string& column,
                            const std::string& what) {
  std::ostringstream out;
  out << file;
  if (row > 0) out << ", row " << row;
  if (!column.empty()) out << ", column '" << column << "'";
  out << ": " << what;
  return out.str();
}

std::string format_double(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof(buffer), "%.17g", value);
  return buffer;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string field;
  std::istringstream stream(line);
  while (std::getline(stream, field, ',')) {
    const auto begin = field.find_first_not_of(" \t\r");
    const auto end = field.find_last_not_of(" \t\r");
    fields.push_back(begin == std::string::npos ? "" : field.substr(begin, end - begin + 1));
  }
  if (!line.empty() && line.back() == ',') fields.push_back("");
  return fields;
}

double parse_probability(const std::string& text, const std::string& file, long row,
                         const std::string& column) {
  double value = 0.0;
  try {
    std::size_t consumed = 0;
    value = std::stod(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument("trailing characters");
  } catch (const std::exception&) {
    throw DataError(file, row, column, "not a number: '" + text + "'");
  }
  if (std::isnan(value)) throw DataError(file, row, column, "NaN probability");
  if (value < 0.0) throw DataError(file, row, column, "negative probability");
  return value;
}

long long parse_integer(const std::string& text, const std::string& file, long row,
                        const std::string& column) {
  try {
    std::size_t consumed = 0;
    const long long value = std::stoll(text, &consumed);
    if (consumed != text.size()) throw std::invalid_argument("trailing characters");
    return value;
  } catch (const std::exception&) {
    throw DataError(file, row, column, "not an integer: '" + text + "'");
  }
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream input(path);
  if (!input) throw DataError(path.string(), 0, "", "cannot open file for reading");
  return input;
}

std::ofstream open_output(const std::filesystem::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    std::filesystem::create_directories(path.parent_path(), ec);
  }
  std::ofstream output(path);
  if (!output) throw DataError(path.string(), 0, "", "cannot open file for writing");
  return output;
}

void finish_output(std::ofstream& output, const std::filesystem::path& path) {
  output.flush();
  if (!output) throw DataError(path.string(), 0, "", "write failed");
}

// Column layout of one stream file, resolved from its header.
struct StreamHeader {
  int frame = -1;
  int start_s = -1;
  int end_s = -1;
  std::array<int, kEmotionCount> emotions{};
  int extra = -1;
  std::size_t field_count = 0;
};

StreamHeader resolve_stream_header(const std::vector<std::string>& fields, const StreamSpec& spec,
                                   int class_count, const std::string& extra_column,
                                   const std::string& file) {
  StreamHeader header;
  header.emotions.fill(-1);
  header.field_count = fields.size();
  for (int i = 0; i < static_cast<int>(fields.size()); ++i) {
    const std::string& name = fields[static_cast<std::size_t>(i)];
    if (name == "frame") {
      header.frame = i;
    } else if (name == "start_s") {
      header.start_s = i;
    } else if (name == "end_s") {
      header.end_s = i;
    } else if (auto emotion = parse_emotion(name)) {
      header.emotions[static_cast<std::size_t>(*emotion)] = i;
    } else if (class_count == 8 && name == extra_column) {
      header.extra = i;
    } else {
      throw DataError(file, 1, name, "unexpected column");
    }
  }
  for (int c = 0; c < kEmotionCount; ++c) {
    if (header.emotions[static_cast<std::size_t>(c)] < 0) {
      throw DataError(file, 1, std::string(kEmotionNames[static_cast<std::size_t>(c)]),
                      "missing column");
    }
  }
  if (class_count == 8 && header.extra < 0) {
    throw DataError(file, 1, extra_column, "missing column");
  }
  if (spec.kind == StreamKind::PerFrame) {
    if (header.frame < 0) throw DataError(file, 1, "frame", "missing column");
  } else {
    if (header.start_s < 0) throw DataError(file, 1, "start_s", "missing column");
    if (header.end_s < 0) throw DataError(file, 1, "end_s", "missing column");
  }
  return header;
}

// Reads the emotion fields of one row, drops any extra column and
// renormalizes so the seven entries sum to one exactly.
Vec7 parse_distribution(const std::vector<std::string>& fields, const StreamHeader& header,
                        const std::string& file, long row) {
  Vec7 values;
  double total = 0.0;
  for (int c = 0; c < kEmotionCount; ++c) {
    const int column = header.emotions[static_cast<std::size_t>(c)];
    values(c) = parse_probability(fields[static_cast<std::size_t>(column)], file, row,
                                  std::string(kEmotionNames[static_cast<std::size_t>(c)]));
    total += values(c);
  }
  double extra = 0.0;
  if (header.extra >= 0) {
    extra = parse_probability(fields[static_cast<std::size_t>(header.extra)], file, row, "extra");
  }
  if (std::abs(total + extra - 1.0) > 1e-4) {
    throw DataError(file, row, "", "probabilities sum to " + format_double(total + extra) +
                                       ", expected 1 within 1e-4");
  }
  if (total <= 0.0) {
    throw DataError(file, row, "", "no probability mass left after dropping the extra column");
  }
  return values / total;
}

json manifest_to_json(const DatasetManifest& manifest) {
  json models = json::array();
  for (const auto& model : manifest.models) {
    json entry{
        {"model_id", model.model_id},
        {"file", model.file},
        {"kind", std::string(to_string(model.spec.kind))},
        {"class_count", model.class_count},
    };
    if (model.spec.kind == StreamKind::PerFrame) {
      entry["native_fps"] = model.spec.native_fps;
      entry["frame_sampling_step"] = model.spec.frame_sampling_step;
      if (model.allow_upsample) entry["allow_upsample"] = true;
    } else {
      entry["window_seconds"] = model.spec.window_seconds;
      entry["step_seconds"] = model.spec.step_seconds;
    }
    if (model.class_count == 8) entry["extra_column"] = model.extra_column;
    models.push_back(std::move(entry));
  }
  json root{
      {"dataset_id", manifest.dataset_id},
      {"fps", manifest.fps},
      {"frame_count", manifest.frame_count},
      {"models", std::move(models)},
  };
  if (manifest.labels) {
    root["labels"] = json{{"file", manifest.labels->file},
                          {"task", std::string(to_string(manifest.labels->task))}};
  }
  return root;
}

json load_json(const std::filesystem::path& path) {
  auto input = open_input(path);
  json root;
  try {
    input >> root;
  } catch (const json::exception& error) {
    throw DataError(path.string(), 0, "", std::string("invalid JSON: ") + error.what());
  }
  return root;
}

}  // namespace

DataError::DataError(std::string file, long row, std::string column, const std::string& what)
    : std::runtime_error(compose_message(file, row, column, what)),
      file_(std::move(file)),
      row_(row),
      column_(std::move(column)) {}

std::string_view to_string(LabelTask task) {
  return task == LabelTask::Basic ? "basic" : "compound";
}

std::optional<LabelTask> parse_label_task(std::string_view name) {
  if (name == "basic") return LabelTask::Basic;
  if (name == "compound") return LabelTask::Compound;
  return std::nullopt;
}

void DatasetManifest::validate() const {
  if (dataset_id.empty()) throw std::invalid_argument("manifest: dataset_id is empty");
  if (!(fps > 0.0)) throw std::invalid_argument("manifest: fps must be positive");
  if (frame_count < 0) throw std::invalid_argument("manifest: negative frame count");
  if (models.empty()) throw std::invalid_argument("manifest: no models");
  for (const auto& model : models) {
    if (model.class_count != 7 && model.class_count != 8) {
      throw std::invalid_argument("manifest: class_count must be 7 or 8");
    }
    model.spec.validate();
  }
  std::vector<std::string> ids;
  for (const auto& model : models) ids.push_back(model.model_id);
  std::sort(ids.begin(), ids.end());
  if (std::adjacent_find(ids.begin(), ids.end()) != ids.end()) {
    throw std::invalid_argument("manifest: duplicate model_id");
  }
}

DatasetManifest read_manifest(const std::filesystem::path& path) {
  const json root = load_json(path);
  DatasetManifest manifest;
  try {
    manifest.dataset_id = root.at("dataset_id").get<std::string>();
    manifest.fps = root.at("fps").get<double>();
    manifest.frame_count = root.at("frame_count").get<Eigen::Index>();
    for (const auto& entry : root.at("models")) {
      ModelEntry model;
      model.model_id = entry.at("model_id").get<std::string>();
      model.file = entry.at("file").get<std::string>();
      const auto kind = parse_stream_kind(entry.at("kind").get<std::string>());
      if (!kind) throw DataError(path.string(), 0, "kind", "unknown stream kind");
      model.spec.kind = *kind;
      if (model.spec.kind == StreamKind::PerFrame) {
        model.spec.native_fps = entry.at("native_fps").get<double>();
        model.spec.frame_sampling_step = entry.value("frame_sampling_step", 1);
        model.allow_upsample = entry.value("allow_upsample", false);
      } else {
        model.spec.window_seconds = entry.at("window_seconds").get<double>();
        model.spec.step_seconds = entry.at("step_seconds").get<double>();
      }
      model.class_count = entry.value("class_count", 7);
      model.extra_column = entry.value("extra_column", std::string("other"));
      manifest.models.push_back(std::move(model));
    }
    if (root.contains("labels")) {
      LabelsEntry labels;
      labels.file = root.at("labels").at("file").get<std::string>();
      const auto task = parse_label_task(root.at("labels").at("task").get<std::string>());
      if (!task) throw DataError(path.string(), 0, "task", "unknown label task");
      labels.task = *task;
      manifest.labels = labels;
    }
  } catch (const json::exception& error) {
    throw DataError(path.string(), 0, "", std::string("manifest field error: ") + error.what());
  }
  try {
    manifest.validate();
  } catch (const std::invalid_argument& error) {
    throw DataError(path.string(), 0, "", error.what());
  }
  return manifest;
}

void write_manifest(const std::filesystem::path& path, const DatasetManifest& manifest) {
  manifest.validate();
  auto output = open_output(path);
  output << manifest_to_json(manifest).dump(2) << '\n';
  finish_output(output, path);
}

RawStream read_stream(const std::filesystem::path& path, const StreamSpec& spec, int class_count,
                      const std::string& extra_column) {
  spec.validate();
  if (class_count != 7 && class_count != 8) {
    throw std::invalid_argument("read_stream: class_count must be 7 or 8");
  }
  auto input = open_input(path);
  const std::string file = path.string();

  std::string line;
  if (!std::getline(input, line)) throw DataError(file, 1, "", "missing header");
  const StreamHeader header =
      resolve_stream_header(split_csv(line), spec, class_count, extra_column, file);

  RawStream stream;
  stream.kind = spec.kind;
  std::vector<Vec7> rows;
  long row_number = 1;
  long long previous_frame = -1;
  double previous_start = -1.0;
  while (std::getline(input, line)) {
    ++row_number;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.field_count) {
      throw DataError(file, row_number, "",
                      "expected " + std::to_string(header.field_count) + " fields, got " +
                          std::to_string(fields.size()));
    }
    if (spec.kind == StreamKind::PerFrame) {
      const long long frame =
          parse_integer(fields[static_cast<std::size_t>(header.frame)], file, row_number, "frame");
      if (frame <= previous_frame) {
        throw DataError(file, row_number, "frame", "frame index is not strictly increasing");
      }
      previous_frame = frame;
      rows.push_back(parse_distribution(fields, header, file, row_number));
    } else {
      TimedWindow window;
      window.start_s = parse_probability(fields[static_cast<std::size_t>(header.start_s)], file,
                                         row_number, "start_s");
      window.end_s = parse_probability(fields[static_cast<std::size_t>(header.end_s)], file,
                                       row_number, "end_s");
      if (!(window.end_s > window.start_s)) {
        throw DataError(file, row_number, "end_s", "window end is not after start");
      }
      if (window.start_s < previous_start) {
        throw DataError(file, row_number, "start_s", "windows are not sorted by start time");
      }
      previous_start = window.start_s;
      window.probabilities = parse_distribution(fields, header, file, row_number);
      stream.windows.push_back(std::move(window));
    }
  }
  if (spec.kind == StreamKind::PerFrame) {
    stream.frames.resize(static_cast<Eigen::Index>(rows.size()), kEmotionCount);
    for (std::size_t i = 0; i < rows.size(); ++i) {
      stream.frames.row(static_cast<Eigen::Index>(i)) = rows[i];
    }
  }
  return stream;
}

void write_stream(const std::filesystem::path& path, const RawStream& stream, int class_count,
                  const std::string& extra_column, std::span<const double> extra_mass) {
  auto output = open_output(path);
  const bool eight = class_count == 8;
  const auto row_count = stream.kind == StreamKind::PerFrame
                             ? static_cast<std::size_t>(stream.frames.rows())
                             : stream.windows.size();
  if (eight && extra_mass.size() != row_count) {
    throw std::invalid_argument("write_stream: extra_mass length does not match rows");
  }

  if (stream.kind == StreamKind::PerFrame) {
    output << "frame";
  } else {
    output << "start_s,end_s";
  }
  for (const auto& name : kEmotionNames) output << ',' << name;
  if (eight) output << ',' << extra_column;
  output << '\n';

  const auto write_values = [&](const Vec7& values, std::size_t index) {
    Vec7 row = values;
    if (eight) row *= (1.0 - extra_mass[index]);
    for (int c = 0; c < kEmotionCount; ++c) output << ',' << format_double(row(c));
    if (eight) output << ',' << format_double(extra_mass[index]);
    output << '\n';
  };

  if (stream.kind == StreamKind::PerFrame) {
    for (Eigen::Index f = 0; f < stream.frames.rows(); ++f) {
      output << f;
      write_values(stream.frames.row(f), static_cast<std::size_t>(f));
    }
  } else {
    for (std::size_t i = 0; i < stream.windows.size(); ++i) {
      output << format_double(stream.windows[i].start_s) << ','
             << format_double(stream.windows[i].end_s);
      write_values(stream.windows[i].probabilities, i);
    }
  }
  finish_output(output, path);
}

std::vector<LabelRow> read_labels(const std::filesystem::path& path, LabelTask task) {
  auto input = open_input(path);
  const std::string file = path.string();

  std::string line;
  if (!std::getline(input, line)) throw DataError(file, 1, "", "missing header");
  const auto header = split_csv(line);
  if (header.size() != 2 || header[0] != "frame" || header[1] != "label") {
    throw DataError(file, 1, "", "expected header 'frame,label'");
  }

  std::vector<LabelRow> rows;
  long row_number = 1;
  long long previous_frame = -1;
  while (std::getline(input, line)) {
    ++row_number;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != 2) throw DataError(file, row_number, "", "expected 2 fields");
    LabelRow row;
    row.frame = parse_integer(fields[0], file, row_number, "frame");
    if (row.frame <= previous_frame) {
      throw DataError(file, row_number, "frame", "frame index is not strictly increasing");
    }
    previous_frame = row.frame;
    if (task == LabelTask::Basic) {
      const auto label = parse_emotion(fields[1]);
      if (!label) throw DataError(file, row_number, "label", "unknown emotion '" + fields[1] + "'");
      row.label = static_cast<int>(*label);
    } else {
      const auto label = parse_compound(fields[1]);
      if (!label) {
        throw DataError(file, row_number, "label", "unknown compound class '" + fields[1] + "'");
      }
      row.label = static_cast<int>(*label);
    }
    rows.push_back(row);
  }
  return rows;
}

void write_labels(const std::filesystem::path& path, LabelTask task,
                  std::span<const LabelRow> rows) {
  auto output = open_output(path);
  output << "frame,label\n";
  for (const auto& row : rows) {
    const std::string_view name = task == LabelTask::Basic
                                      ? to_string(static_cast<BasicEmotion>(row.label))
                                      : to_string(static_cast<CompoundExpression>(row.label));
    output << row.frame << ',' << name << '\n';
  }
  finish_output(output, path);
}

AlignedDataset load_aligned_dataset(const DatasetManifest& manifest,
                                    const std::filesystem::path& base_dir) {
  manifest.validate();
  AlignedDataset dataset;
  dataset.dataset_id = manifest.dataset_id;
  dataset.frame_count = manifest.frame_count;
  dataset.fps = manifest.fps;

  for (const auto& model : manifest.models) {
    const auto path = base_dir / model.file;
    const RawStream raw = read_stream(path, model.spec, model.class_count, model.extra_column);
    StreamMatrix aligned;
    try {
      if (model.spec.kind == StreamKind::PerFrame) {
        aligned = align_frames(raw.frames, model.spec, manifest.frame_count, manifest.fps,
                               model.allow_upsample);
      } else {
        aligned = expand_windows(raw.windows, manifest.frame_count, manifest.fps);
      }
    } catch (const std::invalid_argument& error) {
      throw DataError(path.string(), 0, "", error.what());
    }
    dataset.model_ids.push_back(model.model_id);
    dataset.streams.push_back(std::move(aligned));
  }

  if (manifest.labels) {
    const auto path = base_dir / manifest.labels->file;
    const auto rows = read_labels(path, manifest.labels->task);
    if (manifest.labels->task == LabelTask::Basic) {
      if (static_cast<Eigen::Index>(rows.size()) != manifest.frame_count) {
        throw DataError(path.string(), 0, "",
                        "basic labels must cover every frame: got " +
                            std::to_string(rows.size()) + " of " +
                            std::to_string(manifest.frame_count));
      }
      dataset.labels.resize(rows.size());
      for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].frame != static_cast<Eigen::Index>(i)) {
          throw DataError(path.string(), static_cast<long>(i) + 2, "frame",
                          "expected contiguous frames starting at 0");
        }
        dataset.labels[i] = rows[i].label;
      }
    } else {
      for (const auto& row : rows) {
        if (row.frame >= manifest.frame_count) {
          throw DataError(path.string(), 0, "frame", "label frame beyond frame_count");
        }
        dataset.compound_frames.push_back(row.frame);
        dataset.compound_labels.push_back(row.label);
      }
    }
  }

  dataset.validate();
  return dataset;
}

FusionParameters WeightsFile::to_parameters() const {
  FusionParameters params;
  params.weight_matrix = weight_matrix;
  params.model_weights = model_weights;
  params.model_ids = model_ids;
  params.mode = mode;
  params.validate();
  return params;
}

WeightsFile read_weights(const std::filesystem::path& path) {
  const json root = load_json(path);
  WeightsFile weights;
  try {
    weights.class_order = root.at("class_order").get<std::vector<std::string>>();
    weights.model_ids = root.at("model_ids").get<std::vector<std::string>>();
    const auto mode = parse_fusion_mode(root.at("mode").get<std::string>());
    if (!mode) throw DataError(path.string(), 0, "mode", "unknown fusion mode");
    weights.mode = *mode;

    const auto& matrix = root.at("weight_matrix");
    weights.weight_matrix.resize(static_cast<Eigen::Index>(matrix.size()), kEmotionCount);
    for (Eigen::Index m = 0; m < weights.weight_matrix.rows(); ++m) {
      const auto& row = matrix.at(static_cast<std::size_t>(m));
      if (row.size() != kEmotionCount) {
        throw DataError(path.string(), 0, "weight_matrix", "row does not have 7 entries");
      }
      for (int c = 0; c < kEmotionCount; ++c) {
        weights.weight_matrix(m, c) = row.at(static_cast<std::size_t>(c)).get<double>();
      }
    }

    const auto v = root.at("model_weights").get<std::vector<double>>();
    weights.model_weights = Eigen::Map<const Eigen::VectorXd>(v.data(),
                                                              static_cast<Eigen::Index>(v.size()));
    const auto& provenance = root.at("provenance");
    weights.provenance.seed = provenance.at("seed").get<std::uint64_t>();
    weights.provenance.trials = provenance.at("trials").get<int>();
    weights.provenance.metric = provenance.at("metric").get<std::string>();
    weights.provenance.validation_dataset_id =
        provenance.at("validation_dataset_id").get<std::string>();
    weights.provenance.score = provenance.at("score").get<double>();
  } catch (const json::exception& error) {
    throw DataError(path.string(), 0, "", std::string("weights field error: ") + error.what());
  }

  // The stored class order is canonical by contract; anything else means
  // the file was produced against a different taxonomy.
  for (int c = 0; c < kEmotionCount; ++c) {
    if (weights.class_order.size() != kEmotionCount ||
        weights.class_order[static_cast<std::size_t>(c)] != kEmotionNames[static_cast<std::size_t>(c)]) {
      throw DataError(path.string(), 0, "class_order", "class order is not canonical");
    }
  }
  if (static_cast<Eigen::Index>(weights.model_ids.size()) != weights.weight_matrix.rows() ||
      weights.model_weights.size() != weights.weight_matrix.rows()) {
    throw DataError(path.string(), 0, "", "model dimensions are inconsistent");
  }
  return weights;
}

void write_weights(const std::filesystem::path& path, const WeightsFile& weights) {
  json matrix = json::array();
  for (Eigen::Index m = 0; m < weights.weight_matrix.rows(); ++m) {
    json row = json::array();
    for (int c = 0; c < kEmotionCount; ++c) row.push_back(weights.weight_matrix(m, c));
    matrix.push_back(std::move(row));
  }
  json class_order = json::array();
  for (const auto& name : kEmotionNames) class_order.push_back(std::string(name));

  const json root{
      {"class_order", std::move(class_order)},
      {"model_ids", weights.model_ids},
      {"mode", std::string(to_string(weights.mode))},
      {"weight_matrix", std::move(matrix)},
      {"model_weights", std::vector<double>(weights.model_weights.begin(),
                                            weights.model_weights.end())},
      {"provenance",
       {{"seed", weights.provenance.seed},
        {"trials", weights.provenance.trials},
        {"metric", weights.provenance.metric},
        {"validation_dataset_id", weights.provenance.validation_dataset_id},
        {"score", weights.provenance.score}}},
  };
  auto output = open_output(path);
  output << root.dump(2) << '\n';
  finish_output(output, path);
}

void write_compound_predictions(const std::filesystem::path& path,
                                std::span<const FramePrediction> predictions) {
  auto output = open_output(path);
  output << "frame,prediction";
  for (const auto& name : kCompoundNames) output << ',' << name;
  output << '\n';
  for (std::size_t f = 0; f < predictions.size(); ++f) {
    output << f << ',' << to_string(predictions[f].decision);
    for (int c = 0; c < kCompoundCount; ++c) {
      output << ',' << format_double(predictions[f].scores(c));
    }
    output << '\n';
  }
  finish_output(output, path);
}

namespace {

PredictionRows read_prediction_rows(const std::filesystem::path& path,
                                    std::span<const std::string_view> class_names,
                                    LabelTask task) {
  auto input = open_input(path);
  const std::string file = path.string();

  std::string line;
  if (!std::getline(input, line)) throw DataError(file, 1, "", "missing header");
  const auto header = split_csv(line);
  if (header.size() != 2 + class_names.size() || header[0] != "frame" ||
      header[1] != "prediction") {
    throw DataError(file, 1, "", "unexpected prediction header");
  }
  for (std::size_t i = 0; i < class_names.size(); ++i) {
    if (header[i + 2] != class_names[i]) {
      throw DataError(file, 1, std::string(class_names[i]), "missing or misplaced score column");
    }
  }

  PredictionRows rows;
  long row_number = 1;
  long long previous_frame = -1;
  while (std::getline(input, line)) {
    ++row_number;
    if (line.empty()) continue;
    const auto fields = split_csv(line);
    if (fields.size() != header.size()) {
      throw DataError(file, row_number, "", "wrong field count");
    }
    const long long frame = parse_integer(fields[0], file, row_number, "frame");
    if (frame <= previous_frame) {
      throw DataError(file, row_number, "frame", "frame index is not strictly increasing");
    }
    previous_frame = frame;
    int decision = -1;
    if (task == LabelTask::Basic) {
      const auto parsed = parse_emotion(fields[1]);
      if (!parsed) throw DataError(file, row_number, "prediction", "unknown emotion");
      decision = static_cast<int>(*parsed);
    } else {
      const auto parsed = parse_compound(fields[1]);
      if (!parsed) throw DataError(file, row_number, "prediction", "unknown compound class");
      decision = static_cast<int>(*parsed);
    }
    Eigen::VectorXd scores(static_cast<Eigen::Index>(class_names.size()));
    for (std::size_t c = 0; c < class_names.size(); ++c) {
      double value = 0.0;
      try {
        value = std::stod(fields[c + 2]);
      } catch (const std::exception&) {
        throw DataError(file, row_number, std::string(class_names[c]), "not a number");
      }
      scores(static_cast<Eigen::Index>(c)) = value;
    }
    rows.frames.push_back(frame);
    rows.decisions.push_back(decision);
    rows.scores.push_back(std::move(scores));
  }
  return rows;
}

}  // namespace

PredictionRows read_predictions(const std::filesystem::path& path, LabelTask task) {
  if (task == LabelTask::Basic) {
    return read_prediction_rows(path, std::span<const std::string_view>(kEmotionNames), task);
  }
  return read_prediction_rows(path, std::span<const std::string_view>(kCompoundNames), task);
}

void write_basic_predictions(const std::filesystem::path& path, std::span<const int> decisions,
                             const StreamMatrix& fused) {
  if (static_cast<Eigen::Index>(decisions.size()) != fused.rows()) {
    throw std::invalid_argument("write_basic_predictions: decision count does not match rows");
  }
  auto output = open_output(path);
  output << "frame,prediction";
  for (const auto& name : kEmotionNames) output << ',' << name;
  output << '\n';
  for (Eigen::Index f = 0; f < fused.rows(); ++f) {
    output << f << ',' << to_string(static_cast<BasicEmotion>(decisions[static_cast<std::size_t>(f)]));
    for (int c = 0; c < kEmotionCount; ++c) output << ',' << format_double(fused(f, c));
    output << '\n';
  }
  finish_output(output, path);
}

void write_diagnostics(const std::filesystem::path& path,
                       std::span<const DiagnosticEvent> events) {
  auto output = open_output(path);
  output << "frame,event\n";
  for (const auto& event : events) output << event.frame << ',' << event.event << '\n';
  finish_output(output, path);
}

void write_report(const std::filesystem::path& path, const EvaluationReport& report,
                  LabelTask task) {
  json per_class = json::array();
  const auto names = task == LabelTask::Basic
                         ? std::span<const std::string_view>(kEmotionNames)
                         : std::span<const std::string_view>(kCompoundNames);
  for (int c = 0; c < report.confusion.class_count(); ++c) {
    per_class.push_back(json{
        {"name", std::string(names[static_cast<std::size_t>(c)])},
        {"f1", report.per_class_f1(c)},
        {"recall", report.per_class_recall(c)},
        {"support", report.confusion.counts.row(c).sum()},
    });
  }
  json confusion = json::array();
  for (Eigen::Index t = 0; t < report.confusion.counts.rows(); ++t) {
    json row = json::array();
    for (Eigen::Index p = 0; p < report.confusion.counts.cols(); ++p) {
      row.push_back(report.confusion.counts(t, p));
    }
    confusion.push_back(std::move(row));
  }
  const json root{
      {"task", std::string(to_string(task))},
      {"macro_f1", report.macro_f1},
      {"uar", report.uar},
      {"per_class", std::move(per_class)},
      {"confusion", std::move(confusion)},
      {"frames_evaluated", report.frames_evaluated},
  };
  auto output = open_output(path);
  output << root.dump(2) << '\n';
  finish_output(output, path);
}

}  // namespace emofuse

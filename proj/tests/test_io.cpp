#include <doctest.h>

#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "emofuse/io.hpp"
#include "helpers.hpp"

using namespace emofuse;

namespace {

const std::string kPerFrameHeader =
    "frame,neutral,anger,disgust,fear,happiness,sadness,surprise\n";

StreamSpec per_frame_spec(double fps, int step = 1) {
  StreamSpec spec;
  spec.kind = StreamKind::PerFrame;
  spec.native_fps = fps;
  spec.frame_sampling_step = step;
  return spec;
}

StreamSpec windowed_spec(double window, double step) {
  StreamSpec spec;
  spec.kind = StreamKind::Windowed;
  spec.window_seconds = window;
  spec.step_seconds = step;
  return spec;
}

RawStream random_per_frame(std::mt19937_64& rng, int rows) {
  RawStream stream;
  stream.kind = StreamKind::PerFrame;
  stream.frames.resize(rows, kEmotionCount);
  for (int f = 0; f < rows; ++f) {
    stream.frames.row(f) = testutil::random_simplex(rng).transpose();
  }
  return stream;
}

}  // namespace

TEST_CASE("data errors carry file, row and column context") {
  const DataError error("streams/vd.csv", 12, "fear", "negative probability");
  CHECK(error.file() == "streams/vd.csv");
  CHECK(error.row() == 12);
  CHECK(error.column() == "fear");
  const std::string what = error.what();
  CHECK(what.find("streams/vd.csv") != std::string::npos);
  CHECK(what.find("row 12") != std::string::npos);
  CHECK(what.find("'fear'") != std::string::npos);
  CHECK(what.find("negative probability") != std::string::npos);
}

TEST_CASE("per-frame streams round-trip through csv") {
  const auto dir = testutil::fresh_dir("io-per-frame");
  std::mt19937_64 rng(201);
  const RawStream stream = random_per_frame(rng, 6);

  const auto path = dir / "stream.csv";
  write_stream(path, stream);
  const RawStream loaded = read_stream(path, per_frame_spec(5.0), 7);

  REQUIRE(loaded.frames.rows() == 6);
  for (int f = 0; f < 6; ++f) {
    CHECK(std::abs(loaded.frames.row(f).sum() - 1.0) <= 1e-12);
    for (int c = 0; c < kEmotionCount; ++c) {
      CHECK(loaded.frames(f, c) == doctest::Approx(stream.frames(f, c)).epsilon(1e-12));
    }
  }

  // One header line plus one line per frame.
  const auto text = testutil::read_text(path);
  CHECK(std::count(text.begin(), text.end(), '\n') == 7);
}

TEST_CASE("a header-only stream file parses to zero frames") {
  const auto dir = testutil::fresh_dir("io-empty");
  const auto path = dir / "empty.csv";
  testutil::write_text(path, kPerFrameHeader);
  const RawStream loaded = read_stream(path, per_frame_spec(5.0), 7);
  CHECK(loaded.frames.rows() == 0);
}

TEST_CASE("windowed streams round-trip with exact timestamps") {
  const auto dir = testutil::fresh_dir("io-windowed");
  std::mt19937_64 rng(203);

  RawStream stream;
  stream.kind = StreamKind::Windowed;
  for (int k = 0; k < 4; ++k) {
    TimedWindow w;
    w.start_s = 2.0 * k + 0.125;
    w.end_s = w.start_s + 4.0;
    w.probabilities = testutil::random_simplex(rng);
    stream.windows.push_back(w);
  }

  const auto path = dir / "windows.csv";
  write_stream(path, stream);
  const RawStream loaded = read_stream(path, windowed_spec(4.0, 2.0), 7);

  REQUIRE(loaded.windows.size() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(loaded.windows[k].start_s == stream.windows[k].start_s);
    CHECK(loaded.windows[k].end_s == stream.windows[k].end_s);
    for (int c = 0; c < kEmotionCount; ++c) {
      CHECK(loaded.windows[k].probabilities(c) ==
            doctest::Approx(stream.windows[k].probabilities(c)).epsilon(1e-12));
    }
  }
}

TEST_CASE("an eight-class stream drops the extra column and renormalizes") {
  const auto dir = testutil::fresh_dir("io-eight");
  std::mt19937_64 rng(205);
  const RawStream stream = random_per_frame(rng, 5);
  const std::vector<double> extra_mass(5, 0.2);

  const auto path = dir / "eight.csv";
  write_stream(path, stream, 8, "other", extra_mass);

  // On disk the seven emotions carry 0.8 of the mass.
  const auto text = testutil::read_text(path);
  CHECK(text.find(",other\n") != std::string::npos);

  const RawStream loaded = read_stream(path, per_frame_spec(5.0), 8, "other");
  REQUIRE(loaded.frames.rows() == 5);
  for (int f = 0; f < 5; ++f) {
    for (int c = 0; c < kEmotionCount; ++c) {
      CHECK(loaded.frames(f, c) == doctest::Approx(stream.frames(f, c)).epsilon(1e-12));
    }
  }

  // Reading the same file as seven-class fails on the unexpected column.
  CHECK_THROWS_AS(read_stream(path, per_frame_spec(5.0), 7), DataError);

  // Mass length must match the row count on the write side.
  const std::vector<double> short_mass(3, 0.2);
  CHECK_THROWS_AS(write_stream(dir / "bad.csv", stream, 8, "other", short_mass),
                  std::invalid_argument);
}

TEST_CASE("row sums are checked against a 1e-4 tolerance") {
  const auto dir = testutil::fresh_dir("io-tolerance");

  const auto good = dir / "good.csv";
  testutil::write_text(good, kPerFrameHeader + "0,0.99995,0,0,0,0,0,0\n");
  const RawStream loaded = read_stream(good, per_frame_spec(5.0), 7);
  REQUIRE(loaded.frames.rows() == 1);
  CHECK(loaded.frames(0, 0) == 1.0);
  CHECK(loaded.frames.row(0).sum() == doctest::Approx(1.0).epsilon(1e-12));

  const auto bad = dir / "bad.csv";
  testutil::write_text(bad, kPerFrameHeader + "0,0.999,0,0,0,0,0,0\n");
  CHECK_THROWS_AS(read_stream(bad, per_frame_spec(5.0), 7), DataError);
  try {
    read_stream(bad, per_frame_spec(5.0), 7);
  } catch (const DataError& error) {
    CHECK(error.row() == 2);
  }
}

TEST_CASE("malformed stream rows raise located errors") {
  const auto dir = testutil::fresh_dir("io-malformed");
  const auto expect_error = [&](const std::string& name, const std::string& body, long row,
                                const std::string& column) {
    const auto path = dir / name;
    testutil::write_text(path, body);
    try {
      read_stream(path, per_frame_spec(5.0), 7);
      FAIL("expected a DataError for " << name);
    } catch (const DataError& error) {
      CHECK(error.row() == row);
      CHECK(error.column() == column);
    }
  };

  expect_error("negative.csv", kPerFrameHeader + "0,1.1,-0.1,0,0,0,0,0\n", 2, "anger");
  expect_error("nan.csv", kPerFrameHeader + "0,nan,1,0,0,0,0,0\n", 2, "neutral");
  expect_error("text.csv", kPerFrameHeader + "0,maybe,1,0,0,0,0,0\n", 2, "neutral");
  expect_error("frame.csv", kPerFrameHeader + "x,1,0,0,0,0,0,0\n", 2, "frame");
  expect_error("order.csv", kPerFrameHeader + "0,1,0,0,0,0,0,0\n0,1,0,0,0,0,0,0\n", 3, "frame");
  expect_error("missing.csv", "frame,neutral,anger,disgust,fear,happiness,sadness\n", 1,
               "surprise");
  expect_error("unknown.csv",
               "frame,neutral,anger,disgust,fear,happiness,sadness,surprise,boredom\n", 1,
               "boredom");
  expect_error("fields.csv", kPerFrameHeader + "0,1,0,0,0,0,0,0,\n", 2, "");

  // Windowed-specific checks.
  const std::string window_header =
      "start_s,end_s,neutral,anger,disgust,fear,happiness,sadness,surprise\n";
  const auto windowed = [&](const std::string& name, const std::string& body, long row,
                            const std::string& column) {
    const auto path = dir / name;
    testutil::write_text(path, body);
    try {
      read_stream(path, windowed_spec(4.0, 2.0), 7);
      FAIL("expected a DataError for " << name);
    } catch (const DataError& error) {
      CHECK(error.row() == row);
      CHECK(error.column() == column);
    }
  };
  windowed("inverted.csv", window_header + "2,2,1,0,0,0,0,0,0\n", 2, "end_s");
  windowed("unsorted.csv", window_header + "2,6,1,0,0,0,0,0,0\n0,4,1,0,0,0,0,0,0\n", 3,
           "start_s");
  windowed("noframe.csv", kPerFrameHeader + "0,1,0,0,0,0,0,0\n", 1, "start_s");

  CHECK_THROWS_AS(read_stream(dir / "absent.csv", per_frame_spec(5.0), 7), DataError);
}

TEST_CASE("label files round-trip for both tasks") {
  const auto dir = testutil::fresh_dir("io-labels");

  std::vector<LabelRow> basic;
  for (int f = 0; f < 5; ++f) basic.push_back({f, f % kEmotionCount});
  const auto basic_path = dir / "basic.csv";
  write_labels(basic_path, LabelTask::Basic, basic);
  const auto basic_loaded = read_labels(basic_path, LabelTask::Basic);
  REQUIRE(basic_loaded.size() == 5);
  for (std::size_t i = 0; i < 5; ++i) {
    CHECK(basic_loaded[i].frame == basic[i].frame);
    CHECK(basic_loaded[i].label == basic[i].label);
  }

  std::vector<LabelRow> compound = {{3, 1}, {9, 6}, {40, 0}};
  const auto ce_path = dir / "ce.csv";
  write_labels(ce_path, LabelTask::Compound, compound);
  const auto ce_loaded = read_labels(ce_path, LabelTask::Compound);
  REQUIRE(ce_loaded.size() == 3);
  CHECK(ce_loaded[1].frame == 9);
  CHECK(ce_loaded[1].label == 6);

  // A compound name is not a valid basic label.
  CHECK_THROWS_AS(read_labels(ce_path, LabelTask::Basic), DataError);

  testutil::write_text(dir / "header.csv", "frame,emotion\n0,anger\n");
  CHECK_THROWS_AS(read_labels(dir / "header.csv", LabelTask::Basic), DataError);

  testutil::write_text(dir / "shuffled.csv", "frame,label\n4,anger\n2,fear\n");
  CHECK_THROWS_AS(read_labels(dir / "shuffled.csv", LabelTask::Basic), DataError);
}

TEST_CASE("manifests round-trip through json") {
  const auto dir = testutil::fresh_dir("io-manifest");

  DatasetManifest manifest;
  manifest.dataset_id = "toy";
  manifest.fps = 5.0;
  manifest.frame_count = 10;
  ModelEntry per_frame;
  per_frame.model_id = "vision";
  per_frame.file = "streams/vision.csv";
  per_frame.spec = per_frame_spec(25.0, 5);
  manifest.models.push_back(per_frame);
  ModelEntry windowed;
  windowed.model_id = "audio";
  windowed.file = "streams/audio.csv";
  windowed.spec = windowed_spec(4.0, 2.0);
  windowed.class_count = 8;
  windowed.extra_column = "other";
  manifest.models.push_back(windowed);
  manifest.labels = LabelsEntry{"labels.csv", LabelTask::Basic};

  const auto path = dir / "manifest.json";
  write_manifest(path, manifest);
  const DatasetManifest loaded = read_manifest(path);

  CHECK(loaded.dataset_id == "toy");
  CHECK(loaded.fps == 5.0);
  CHECK(loaded.frame_count == 10);
  REQUIRE(loaded.models.size() == 2);
  CHECK(loaded.models[0].model_id == "vision");
  CHECK(loaded.models[0].spec.kind == StreamKind::PerFrame);
  CHECK(loaded.models[0].spec.native_fps == 25.0);
  CHECK(loaded.models[0].spec.frame_sampling_step == 5);
  CHECK(loaded.models[0].class_count == 7);
  CHECK(loaded.models[1].spec.kind == StreamKind::Windowed);
  CHECK(loaded.models[1].spec.window_seconds == 4.0);
  CHECK(loaded.models[1].spec.step_seconds == 2.0);
  CHECK(loaded.models[1].class_count == 8);
  CHECK(loaded.models[1].extra_column == "other");
  REQUIRE(loaded.labels.has_value());
  CHECK(loaded.labels->file == "labels.csv");
  CHECK(loaded.labels->task == LabelTask::Basic);

  testutil::write_text(dir / "broken.json", "{\"dataset_id\": ");
  CHECK_THROWS_AS(read_manifest(dir / "broken.json"), DataError);

  DatasetManifest duplicate = manifest;
  duplicate.models[1].model_id = "vision";
  CHECK_THROWS_AS(write_manifest(dir / "dup.json", duplicate), std::invalid_argument);

  DatasetManifest no_models = manifest;
  no_models.models.clear();
  CHECK_THROWS_AS(no_models.validate(), std::invalid_argument);

  DatasetManifest bad_classes = manifest;
  bad_classes.models[0].class_count = 6;
  CHECK_THROWS_AS(bad_classes.validate(), std::invalid_argument);
}

TEST_CASE("weights files round-trip bit-exact") {
  const auto dir = testutil::fresh_dir("io-weights");

  WeightsFile weights;
  weights.model_ids = {"vs", "vd", "w2v2"};
  weights.mode = FusionMode::Hierarchical;
  weights.weight_matrix = sample_weight_matrix(3, 3, 0.3);
  weights.model_weights = sample_model_weights(4, 3);
  weights.provenance.seed = 11;
  weights.provenance.trials = 2000;
  weights.provenance.metric = "macro_f1";
  weights.provenance.validation_dataset_id = "synth-default";
  weights.provenance.score = 0.9819;

  const auto path = dir / "weights.json";
  write_weights(path, weights);
  const WeightsFile loaded = read_weights(path);

  CHECK(loaded.model_ids == weights.model_ids);
  CHECK(loaded.mode == FusionMode::Hierarchical);
  CHECK((loaded.weight_matrix.array() == weights.weight_matrix.array()).all());
  CHECK((loaded.model_weights.array() == weights.model_weights.array()).all());
  CHECK(loaded.provenance.seed == 11);
  CHECK(loaded.provenance.trials == 2000);
  CHECK(loaded.provenance.metric == "macro_f1");
  CHECK(loaded.provenance.validation_dataset_id == "synth-default");
  CHECK(loaded.provenance.score == 0.9819);
  REQUIRE(loaded.class_order.size() == kEmotionCount);
  CHECK(loaded.class_order[0] == "neutral");

  CHECK_NOTHROW(loaded.to_parameters());
}

TEST_CASE("weights files with a foreign class order are rejected") {
  const auto dir = testutil::fresh_dir("io-weights-order");

  WeightsFile weights;
  weights.model_ids = {"a", "b"};
  weights.mode = FusionMode::Dirichlet;
  weights.weight_matrix = uniform_weight_matrix(2);
  weights.model_weights = ModelWeights::Ones(2);

  const auto path = dir / "weights.json";
  write_weights(path, weights);

  auto text = testutil::read_text(path);
  const auto pos = text.find("neutral");
  REQUIRE(pos != std::string::npos);
  text.replace(pos, 7, "zenlike");
  testutil::write_text(path, text);

  try {
    read_weights(path);
    FAIL("expected a DataError");
  } catch (const DataError& error) {
    CHECK(error.column() == "class_order");
  }
}

TEST_CASE("weights consistency checks") {
  const auto dir = testutil::fresh_dir("io-weights-dims");

  WeightsFile weights;
  weights.model_ids = {"a", "b"};
  weights.mode = FusionMode::Dirichlet;
  weights.weight_matrix = uniform_weight_matrix(3);
  weights.model_weights = ModelWeights::Ones(3);
  const auto path = dir / "weights.json";
  write_weights(path, weights);
  CHECK_THROWS_AS(read_weights(path), DataError);

  // A dirichlet-mode file with non-unit importance weights fails at the
  // parameter gate, not at parse time.
  WeightsFile off_mode;
  off_mode.model_ids = {"a", "b"};
  off_mode.mode = FusionMode::Dirichlet;
  off_mode.weight_matrix = uniform_weight_matrix(2);
  off_mode.model_weights = ModelWeights::Constant(2, 0.5);
  const auto off_path = dir / "off.json";
  write_weights(off_path, off_mode);
  const WeightsFile loaded = read_weights(off_path);
  CHECK_THROWS_AS(loaded.to_parameters(), std::invalid_argument);
}

TEST_CASE("compound predictions round-trip") {
  const auto dir = testutil::fresh_dir("io-predictions");
  std::mt19937_64 rng(207);

  std::vector<FramePrediction> predictions(4);
  for (auto& p : predictions) {
    for (int c = 0; c < kCompoundCount; ++c) {
      p.scores(c) = std::uniform_real_distribution<double>(0.0, 1.0)(rng);
    }
    p.decision = decide(p.scores);
  }

  const auto path = dir / "predictions.csv";
  write_compound_predictions(path, predictions);
  const PredictionRows rows = read_predictions(path, LabelTask::Compound);

  REQUIRE(rows.frames.size() == 4);
  for (std::size_t f = 0; f < 4; ++f) {
    CHECK(rows.frames[f] == static_cast<Eigen::Index>(f));
    CHECK(rows.decisions[f] == static_cast<int>(predictions[f].decision));
    REQUIRE(rows.scores[f].size() == kCompoundCount);
    for (int c = 0; c < kCompoundCount; ++c) {
      CHECK(rows.scores[f](c) == predictions[f].scores(c));
    }
  }

  // The basic-task reader refuses the compound header.
  CHECK_THROWS_AS(read_predictions(path, LabelTask::Basic), DataError);
}

TEST_CASE("basic predictions round-trip") {
  const auto dir = testutil::fresh_dir("io-basic-predictions");
  std::mt19937_64 rng(209);

  StreamMatrix fused(3, kEmotionCount);
  std::vector<int> decisions;
  for (int f = 0; f < 3; ++f) {
    fused.row(f) = testutil::random_simplex(rng).transpose();
    decisions.push_back(argmax_lowest(fused.row(f)));
  }

  const auto path = dir / "basic.csv";
  write_basic_predictions(path, decisions, fused);
  const PredictionRows rows = read_predictions(path, LabelTask::Basic);

  REQUIRE(rows.frames.size() == 3);
  for (std::size_t f = 0; f < 3; ++f) {
    CHECK(rows.decisions[f] == decisions[f]);
    for (int c = 0; c < kEmotionCount; ++c) {
      CHECK(rows.scores[f](c) == fused(static_cast<Eigen::Index>(f), c));
    }
  }

  const std::vector<int> short_decisions = {0};
  CHECK_THROWS_AS(write_basic_predictions(dir / "bad.csv", short_decisions, fused),
                  std::invalid_argument);
}

TEST_CASE("diagnostics files list one event per line") {
  const auto dir = testutil::fresh_dir("io-diagnostics");
  const std::vector<DiagnosticEvent> events = {{3, "all_masked"}, {9, "neutral_dominant"}};
  const auto path = dir / "diag.csv";
  write_diagnostics(path, events);
  CHECK(testutil::read_text(path) == "frame,event\n3,all_masked\n9,neutral_dominant\n");
}

TEST_CASE("report files carry the headline metrics") {
  const auto dir = testutil::fresh_dir("io-report");
  const std::vector<int> truth = {0, 1, 2, 2};
  const std::vector<int> pred = {0, 1, 2, 1};
  const auto report = evaluate(truth, pred, kCompoundCount);

  const auto path = dir / "report.json";
  write_report(path, report, LabelTask::Compound);
  const auto text = testutil::read_text(path);
  CHECK(text.find("\"task\": \"compound\"") != std::string::npos);
  CHECK(text.find("\"frames_evaluated\": 4") != std::string::npos);
  CHECK(text.find("\"macro_f1\"") != std::string::npos);
  CHECK(text.find("\"uar\"") != std::string::npos);
  CHECK(text.find("\"fearfully_surprised\"") != std::string::npos);
  CHECK(text.find("\"confusion\"") != std::string::npos);
}

TEST_CASE("load_aligned_dataset builds one grid from mixed streams") {
  const auto dir = testutil::fresh_dir("io-load");
  std::filesystem::create_directories(dir / "streams");
  std::mt19937_64 rng(211);

  // 10 frames at 5 fps = 2 seconds. The per-frame model runs at 10 fps.
  const RawStream vision = random_per_frame(rng, 20);
  write_stream(dir / "streams/vision.csv", vision);

  RawStream audio;
  audio.kind = StreamKind::Windowed;
  for (int k = 0; k < 2; ++k) {
    TimedWindow w;
    w.start_s = 1.0 * k;
    w.end_s = w.start_s + 1.0;
    w.probabilities = testutil::random_simplex(rng);
    audio.windows.push_back(w);
  }
  write_stream(dir / "streams/audio.csv", audio);

  std::vector<LabelRow> labels;
  for (int f = 0; f < 10; ++f) labels.push_back({f, (f * 3) % kEmotionCount});
  write_labels(dir / "labels.csv", LabelTask::Basic, labels);

  DatasetManifest manifest;
  manifest.dataset_id = "toy";
  manifest.fps = 5.0;
  manifest.frame_count = 10;
  ModelEntry vision_entry;
  vision_entry.model_id = "vision";
  vision_entry.file = "streams/vision.csv";
  vision_entry.spec = per_frame_spec(10.0);
  manifest.models.push_back(vision_entry);
  ModelEntry audio_entry;
  audio_entry.model_id = "audio";
  audio_entry.file = "streams/audio.csv";
  audio_entry.spec = windowed_spec(1.0, 1.0);
  manifest.models.push_back(audio_entry);
  manifest.labels = LabelsEntry{"labels.csv", LabelTask::Basic};

  const AlignedDataset dataset = load_aligned_dataset(manifest, dir);
  CHECK(dataset.dataset_id == "toy");
  CHECK(dataset.frame_count == 10);
  REQUIRE(dataset.streams.size() == 2);
  CHECK(dataset.streams[0].rows() == 10);
  CHECK(dataset.streams[1].rows() == 10);
  REQUIRE(dataset.has_labels());
  CHECK(dataset.labels.size() == 10);
  CHECK(dataset.labels[3] == 2);

  // Downsampling picked every second vision row.
  for (int f = 0; f < 10; ++f) {
    for (int c = 0; c < kEmotionCount; ++c) {
      CHECK(dataset.streams[0](f, c) ==
            doctest::Approx(vision.frames(std::min(2 * f, 19), c)).epsilon(1e-12));
    }
  }

  SUBCASE("alignment failures name the stream file") {
    DatasetManifest slow = manifest;
    slow.models[0].spec.native_fps = 2.0;  // would require upsampling
    try {
      load_aligned_dataset(slow, dir);
      FAIL("expected a DataError");
    } catch (const DataError& error) {
      CHECK(error.file().find("vision.csv") != std::string::npos);
    }
  }

  SUBCASE("basic labels must cover every frame") {
    std::vector<LabelRow> partial(labels.begin(), labels.end() - 1);
    write_labels(dir / "partial.csv", LabelTask::Basic, partial);
    DatasetManifest broken = manifest;
    broken.labels = LabelsEntry{"partial.csv", LabelTask::Basic};
    CHECK_THROWS_AS(load_aligned_dataset(broken, dir), DataError);

    std::vector<LabelRow> gapped = labels;
    gapped[9].frame = 10;  // skips frame 9
    write_labels(dir / "gapped.csv", LabelTask::Basic, gapped);
    broken.labels = LabelsEntry{"gapped.csv", LabelTask::Basic};
    CHECK_THROWS_AS(load_aligned_dataset(broken, dir), DataError);
  }

  SUBCASE("compound labels may be sparse but must stay in range") {
    std::vector<LabelRow> ce = {{2, 4}, {7, 0}};
    write_labels(dir / "ce.csv", LabelTask::Compound, ce);
    DatasetManifest with_ce = manifest;
    with_ce.labels = LabelsEntry{"ce.csv", LabelTask::Compound};
    const AlignedDataset sparse = load_aligned_dataset(with_ce, dir);
    CHECK_FALSE(sparse.has_labels());
    REQUIRE(sparse.compound_frames.size() == 2);
    CHECK(sparse.compound_frames[0] == 2);
    CHECK(sparse.compound_labels[0] == 4);

    std::vector<LabelRow> outside = {{2, 4}, {10, 0}};
    write_labels(dir / "outside.csv", LabelTask::Compound, outside);
    with_ce.labels = LabelsEntry{"outside.csv", LabelTask::Compound};
    CHECK_THROWS_AS(load_aligned_dataset(with_ce, dir), DataError);
  }
}

TEST_CASE("ingest, write and re-read preserves the aligned stream") {
  // Windowed source -> aligned matrix -> per-frame file -> read -> align is
  // stable: the second pass reproduces the first.
  const auto dir = testutil::fresh_dir("io-stability");
  std::mt19937_64 rng(213);

  RawStream audio;
  audio.kind = StreamKind::Windowed;
  for (int k = 0; k < 5; ++k) {
    TimedWindow w;
    w.start_s = 2.0 * k;
    w.end_s = w.start_s + 4.0;
    w.probabilities = testutil::random_simplex(rng);
    audio.windows.push_back(w);
  }
  const StreamMatrix aligned = expand_windows(audio.windows, 50, 5.0);

  RawStream as_frames;
  as_frames.kind = StreamKind::PerFrame;
  as_frames.frames = aligned;
  const auto path = dir / "aligned.csv";
  write_stream(path, as_frames);

  const RawStream reread = read_stream(path, per_frame_spec(5.0), 7);
  const StreamMatrix again = align_frames(reread.frames, per_frame_spec(5.0), 50, 5.0);
  REQUIRE(again.rows() == 50);
  for (int f = 0; f < 50; ++f) {
    CHECK(argmax_lowest(again.row(f)) == argmax_lowest(aligned.row(f)));
    for (int c = 0; c < kEmotionCount; ++c) {
      CHECK(again(f, c) == doctest::Approx(aligned(f, c)).epsilon(1e-9));
    }
  }
}

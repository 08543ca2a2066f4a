#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "emofuse/emotions.hpp"

namespace emofuse {

enum class StreamKind { PerFrame, Windowed };

std::string_view to_string(StreamKind kind);
std::optional<StreamKind> parse_stream_kind(std::string_view name);

/// Temporal shape of one model stream as it arrives on disk.
struct StreamSpec {
  StreamKind kind = StreamKind::PerFrame;
  double native_fps = 0.0;      // per-frame streams
  double window_seconds = 0.0;  // windowed streams
  double step_seconds = 0.0;
  int frame_sampling_step = 1;  // rows cover every Nth native frame

  /// Effective rate of the rows actually present in a per-frame stream.
  double effective_fps() const { return native_fps / frame_sampling_step; }

  void validate() const;
};

/// One window-level prediction covering [start_s, end_s).
struct TimedWindow {
  double start_s = 0.0;
  double end_s = 0.0;
  Vec7 probabilities = Vec7::Zero();
};

/// Nearest-frame downsampling: output frame t maps to input frame
/// round(t * fps_in / fps_out); output length is ceil(len * fps_out / fps_in).
/// Upsampling uses the same index map (duplication) and is rejected unless
/// explicitly allowed.
StreamMatrix resample_fps(const StreamMatrix& frames, double fps_in, double fps_out,
                          bool allow_upsample = false);

/// Expands window predictions onto the frame grid. A frame takes the
/// renormalized mean of all windows covering its center; frames covered by
/// no window take the nearest window's vector.
StreamMatrix expand_windows(std::span<const TimedWindow> windows, Eigen::Index frame_count,
                            double fps);

/// Frame indices whose centers fall inside [start_s, end_s).
std::vector<Eigen::Index> frames_in_window(double start_s, double end_s, Eigen::Index frame_count,
                                           double fps);

/// Most frequent label; ties break to the lowest class index.
int majority_label(std::span<const int> labels);

/// Aligns one native per-frame stream onto the dataset frame grid.
StreamMatrix align_frames(const StreamMatrix& frames, const StreamSpec& spec,
                          Eigen::Index frame_count, double fps, bool allow_upsample = false);

/// Frame-aligned model streams plus optional labels, all on one grid.
struct AlignedDataset {
  std::string dataset_id;
  Eigen::Index frame_count = 0;
  double fps = 0.0;
  std::vector<std::string> model_ids;
  std::vector<StreamMatrix> streams;  // one frames-by-classes matrix per model

  std::vector<int> labels;  // per-frame basic-emotion labels; empty if absent

  // Sparse compound labels: parallel arrays of frame index and class.
  std::vector<Eigen::Index> compound_frames;
  std::vector<int> compound_labels;

  bool has_labels() const { return !labels.empty(); }
  void validate() const;
};

}  // namespace emofuse

#include "emofuse/temporal.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace emofuse {

std::string_view to_string(StreamKind kind) {
  return kind == StreamKind::PerFrame ? "per_frame" : "windowed";
}

std::optional<StreamKind> parse_stream_kind(std::string_view name) {
  if (name == "per_frame") return StreamKind::PerFrame;
  if (name == "windowed") return StreamKind::Windowed;
  return std::nullopt;
}

void StreamSpec::validate() const {
  if (frame_sampling_step < 1) {
    throw std::invalid_argument("frame_sampling_step must be >= 1");
  }
  if (kind == StreamKind::PerFrame) {
    if (!(native_fps > 0.0)) throw std::invalid_argument("per-frame stream needs native_fps > 0");
  } else {
    if (!(window_seconds > 0.0) || !(step_seconds > 0.0)) {
      throw std::invalid_argument("windowed stream needs positive window and step");
    }
  }
}

StreamMatrix resample_fps(const StreamMatrix& frames, double fps_in, double fps_out,
                          bool allow_upsample) {
  if (!(fps_in > 0.0) || !(fps_out > 0.0)) {
    throw std::invalid_argument("resample_fps: frame rates must be positive");
  }
  if (fps_out > fps_in && !allow_upsample) {
    throw std::invalid_argument("resample_fps: upsampling requested without allow_upsample");
  }
  if (frames.rows() == 0) return frames;

  const Eigen::Index out_count =
      static_cast<Eigen::Index>(std::ceil(static_cast<double>(frames.rows()) * fps_out / fps_in));
  StreamMatrix out(out_count, kEmotionCount);
  for (Eigen::Index t = 0; t < out_count; ++t) {
    Eigen::Index source =
        static_cast<Eigen::Index>(std::llround(static_cast<double>(t) * fps_in / fps_out));
    source = std::min(source, frames.rows() - 1);
    out.row(t) = frames.row(source);
  }
  return out;
}

namespace {

double frame_center(Eigen::Index frame, double fps) {
  return (static_cast<double>(frame) + 0.5) / fps;
}

double distance_to_window(double t, const TimedWindow& window) {
  if (t >= window.start_s && t < window.end_s) return 0.0;
  return t < window.start_s ? window.start_s - t : t - window.end_s;
}

}  // namespace

std::vector<Eigen::Index> frames_in_window(double start_s, double end_s, Eigen::Index frame_count,
                                           double fps) {
  std::vector<Eigen::Index> covered;
  for (Eigen::Index f = 0; f < frame_count; ++f) {
    const double t = frame_center(f, fps);
    if (t >= start_s && t < end_s) covered.push_back(f);
  }
  return covered;
}

StreamMatrix expand_windows(std::span<const TimedWindow> windows, Eigen::Index frame_count,
                            double fps) {
  if (windows.empty()) throw std::invalid_argument("expand_windows: no windows");
  if (!(fps > 0.0)) throw std::invalid_argument("expand_windows: fps must be positive");
  for (std::size_t i = 1; i < windows.size(); ++i) {
    if (windows[i].start_s < windows[i - 1].start_s) {
      throw std::invalid_argument("expand_windows: windows are not sorted by start time");
    }
  }

  StreamMatrix out(frame_count, kEmotionCount);
  for (Eigen::Index f = 0; f < frame_count; ++f) {
    const double t = frame_center(f, fps);
    Vec7 sum = Vec7::Zero();
    int covering = 0;
    for (const auto& window : windows) {
      if (t >= window.start_s && t < window.end_s) {
        sum += window.probabilities;
        ++covering;
      }
    }
    if (covering == 0) {
      // Clip edges can fall outside every window; borrow the nearest one.
      std::size_t nearest = 0;
      double best = distance_to_window(t, windows[0]);
      for (std::size_t i = 1; i < windows.size(); ++i) {
        const double d = distance_to_window(t, windows[i]);
        if (d < best) {
          best = d;
          nearest = i;
        }
      }
      sum = windows[nearest].probabilities;
      covering = 1;
    }
    sum /= covering;
    const double total = sum.sum();
    if (total > 0.0) sum /= total;
    out.row(f) = sum;
  }
  return out;
}

int majority_label(std::span<const int> labels) {
  if (labels.empty()) throw std::invalid_argument("majority_label: empty label sequence");
  int max_label = *std::max_element(labels.begin(), labels.end());
  std::vector<Eigen::Index> tally(static_cast<std::size_t>(max_label) + 1, 0);
  for (int label : labels) {
    if (label < 0) throw std::invalid_argument("majority_label: negative label");
    ++tally[static_cast<std::size_t>(label)];
  }
  int best = 0;
  for (int label = 1; label <= max_label; ++label) {
    if (tally[static_cast<std::size_t>(label)] > tally[static_cast<std::size_t>(best)]) {
      best = label;
    }
  }
  return best;
}

StreamMatrix align_frames(const StreamMatrix& frames, const StreamSpec& spec,
                          Eigen::Index frame_count, double fps, bool allow_upsample) {
  spec.validate();
  if (spec.kind != StreamKind::PerFrame) {
    throw std::invalid_argument("align_frames: stream is not per-frame");
  }
  StreamMatrix aligned = resample_fps(frames, spec.effective_fps(), fps, allow_upsample);
  if (aligned.rows() != frame_count) {
    throw std::invalid_argument("align_frames: resampled length does not match frame count");
  }
  return aligned;
}

void AlignedDataset::validate() const {
  if (streams.size() != model_ids.size()) {
    throw std::invalid_argument("aligned dataset: stream and model id counts differ");
  }
  for (const auto& stream : streams) {
    if (stream.rows() != frame_count) {
      throw std::invalid_argument("aligned dataset: stream length does not match frame count");
    }
    for (Eigen::Index f = 0; f < stream.rows(); ++f) {
      if (std::abs(stream.row(f).sum() - 1.0) > 1e-6 || (stream.row(f).array() < 0.0).any()) {
        throw std::invalid_argument("aligned dataset: stream row is not a distribution");
      }
    }
  }
  if (!labels.empty() && static_cast<Eigen::Index>(labels.size()) != frame_count) {
    throw std::invalid_argument("aligned dataset: label count does not match frame count");
  }
  if (compound_frames.size() != compound_labels.size()) {
    throw std::invalid_argument("aligned dataset: compound label arrays differ in length");
  }
}

}  // namespace emofuse

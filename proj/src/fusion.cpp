#include "emofuse/fusion.hpp"

#include <cmath>
#include <random>
#include <stdexcept>

namespace emofuse {

std::string_view to_string(FusionMode mode) {
  return mode == FusionMode::Dirichlet ? "dirichlet" : "hierarchical";
}

std::optional<FusionMode> parse_fusion_mode(std::string_view name) {
  if (name == "dirichlet") return FusionMode::Dirichlet;
  if (name == "hierarchical") return FusionMode::Hierarchical;
  return std::nullopt;
}

bool on_model_weight_grid(double value) {
  const double steps = (value - kModelWeightMin) / kModelWeightStep;
  const double nearest = std::round(steps);
  if (nearest < 0 || nearest >= kModelWeightGridSize) return false;
  return std::abs(value - model_weight_grid_value(static_cast<int>(nearest))) <= 1e-12;
}

std::uint64_t splitmix64(std::uint64_t state) {
  std::uint64_t z = state + 0x9e3779b97f4a7c15ULL;
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream) {
  return splitmix64(splitmix64(seed) ^ splitmix64(stream * 0x9e3779b97f4a7c15ULL + 1));
}

WeightMatrix sample_weight_matrix(std::uint64_t seed, int num_models, double alpha) {
  if (num_models < 1) throw std::invalid_argument("sample_weight_matrix: num_models must be >= 1");
  if (!(alpha > 0.0)) throw std::invalid_argument("sample_weight_matrix: alpha must be positive");

  std::mt19937_64 engine(derive_seed(seed, 0x57656967687473ULL));
  std::gamma_distribution<double> gamma(alpha, 1.0);

  WeightMatrix weights(num_models, kEmotionCount);
  for (int c = 0; c < kEmotionCount; ++c) {
    double column_sum = 0.0;
    for (int m = 0; m < num_models; ++m) {
      weights(m, c) = gamma(engine);
      column_sum += weights(m, c);
    }
    if (column_sum <= 0.0) {
      // All gamma draws underflowed to zero; fall back to the uniform point.
      weights.col(c).setConstant(1.0 / num_models);
    } else {
      weights.col(c) /= column_sum;
    }
  }
  return weights;
}

ModelWeights sample_model_weights(std::uint64_t seed, int num_models) {
  if (num_models < 1) throw std::invalid_argument("sample_model_weights: num_models must be >= 1");
  std::mt19937_64 engine(derive_seed(seed, 0x4d6f64656c57ULL));
  std::uniform_int_distribution<int> grid(0, kModelWeightGridSize - 1);
  ModelWeights weights(num_models);
  for (int m = 0; m < num_models; ++m) {
    weights(m) = model_weight_grid_value(grid(engine));
  }
  return weights;
}

WeightMatrix uniform_weight_matrix(int num_models) {
  if (num_models < 1) throw std::invalid_argument("uniform_weight_matrix: num_models must be >= 1");
  return WeightMatrix::Constant(num_models, kEmotionCount, 1.0 / num_models);
}

void validate_weight_matrix(const WeightMatrix& weights, double tolerance) {
  if (weights.rows() < 1) throw std::invalid_argument("weight matrix has no model rows");
  if ((weights.array() < 0.0).any()) {
    throw std::invalid_argument("weight matrix has a negative entry");
  }
  for (int c = 0; c < kEmotionCount; ++c) {
    if (std::abs(weights.col(c).sum() - 1.0) > tolerance) {
      throw std::invalid_argument("weight matrix column does not sum to one");
    }
  }
}

void validate_model_weights(const ModelWeights& weights) {
  for (Eigen::Index m = 0; m < weights.size(); ++m) {
    if (!on_model_weight_grid(weights(m))) {
      throw std::invalid_argument("model weight is not on the sampling grid");
    }
  }
}

void FusionParameters::validate() const {
  const auto models = weight_matrix.rows();
  if (models < 1) throw std::invalid_argument("fusion parameters have no models");
  if (model_weights.size() != models) {
    throw std::invalid_argument("model weight count does not match weight matrix rows");
  }
  if (static_cast<Eigen::Index>(model_ids.size()) != models) {
    throw std::invalid_argument("model id count does not match weight matrix rows");
  }
  validate_weight_matrix(weight_matrix);
  if (mode == FusionMode::Dirichlet) {
    if ((model_weights.array() != 1.0).any()) {
      throw std::invalid_argument("dirichlet mode requires all-one model weights");
    }
  } else {
    validate_model_weights(model_weights);
  }
}

FusionParameters uniform_parameters(std::vector<std::string> model_ids, FusionMode mode) {
  const int models = static_cast<int>(model_ids.size());
  FusionParameters params;
  params.weight_matrix = uniform_weight_matrix(models);
  params.model_weights = mode == FusionMode::Dirichlet
                             ? ModelWeights::Ones(models)
                             : ModelWeights::Constant(models, 0.5);
  params.model_ids = std::move(model_ids);
  params.mode = mode;
  return params;
}

ProbVector first_weighting(const ProbVector& probabilities, const Vec7& weight_row) {
  return ProbVector::weighted(weight_probabilities(probabilities.values, weight_row));
}

ProbVector dirichlet_fuse(std::span<const ProbVector> weighted) {
  if (weighted.empty()) throw std::invalid_argument("dirichlet_fuse: no weighted vectors");
  Vec7 fused = Vec7::Zero();
  for (const auto& p : weighted) fused += p.values;
  return ProbVector::weighted(fused);
}

ProbVector hierarchical_fuse(std::span<const ProbVector> weighted, const ModelWeights& model_weights) {
  if (static_cast<Eigen::Index>(weighted.size()) != model_weights.size()) {
    throw std::invalid_argument("hierarchical_fuse: model weight count does not match vectors");
  }
  if (weighted.empty()) throw std::invalid_argument("hierarchical_fuse: no weighted vectors");
  Vec7 fused = Vec7::Zero();
  for (std::size_t m = 0; m < weighted.size(); ++m) {
    fused += weighted[m].values * model_weights(static_cast<Eigen::Index>(m));
  }
  return ProbVector::weighted(fused);
}

ProbVector fuse_frame(const FusionParameters& params, std::span<const ProbVector> raw) {
  if (static_cast<Eigen::Index>(raw.size()) != params.weight_matrix.rows()) {
    throw std::invalid_argument("fuse_frame: stream count does not match weight matrix rows");
  }
  std::vector<ProbVector> weighted;
  weighted.reserve(raw.size());
  for (std::size_t m = 0; m < raw.size(); ++m) {
    weighted.push_back(first_weighting(raw[m], params.weight_matrix.row(static_cast<Eigen::Index>(m))));
  }
  if (params.mode == FusionMode::Dirichlet) return dirichlet_fuse(weighted);
  return hierarchical_fuse(weighted, params.model_weights);
}

StreamMatrix fuse_frames(const FusionParameters& params, std::span<const StreamMatrix> streams) {
  if (static_cast<Eigen::Index>(streams.size()) != params.weight_matrix.rows()) {
    throw std::invalid_argument("fuse_frames: stream count does not match weight matrix rows");
  }
  if (streams.empty()) throw std::invalid_argument("fuse_frames: no streams");
  const Eigen::Index frames = streams[0].rows();
  StreamMatrix fused = StreamMatrix::Zero(frames, kEmotionCount);
  for (std::size_t m = 0; m < streams.size(); ++m) {
    if (streams[m].rows() != frames) {
      throw std::invalid_argument("fuse_frames: streams are not frame-aligned");
    }
    const double v = params.model_weights(static_cast<Eigen::Index>(m));
    fused.array() += streams[m].array().rowwise() *
                     (params.weight_matrix.row(static_cast<Eigen::Index>(m)).array() * v);
  }
  return fused;
}

}  // namespace emofuse

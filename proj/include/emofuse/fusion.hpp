#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "emofuse/emotions.hpp"

namespace emofuse {

/// Per-class, per-model weight matrix. Rows index models, columns index the
/// basic emotions; every column is a point on the model simplex.
using WeightMatrix = Eigen::Matrix<double, Eigen::Dynamic, kEmotionCount>;

/// Scalar per-model importance weights used by the second weighting stage.
using ModelWeights = Eigen::VectorXd;

enum class FusionMode { Dirichlet, Hierarchical };

std::string_view to_string(FusionMode mode);
std::optional<FusionMode> parse_fusion_mode(std::string_view name);

// Model-importance weights live on a fixed grid: 0.01, 0.015, ..., 0.5.
inline constexpr double kModelWeightMin = 0.01;
inline constexpr double kModelWeightStep = 0.005;
inline constexpr int kModelWeightGridSize = 99;

inline double model_weight_grid_value(int index) {
  return kModelWeightMin + kModelWeightStep * index;
}

bool on_model_weight_grid(double value);

/// Splittable counter-style mix; every consumer of randomness derives its
/// own engine seed from (root seed, stream id) so runs stay reproducible
/// regardless of evaluation order.
std::uint64_t splitmix64(std::uint64_t state);
std::uint64_t derive_seed(std::uint64_t seed, std::uint64_t stream);

/// Draws each emotion column independently from a symmetric
/// Dirichlet(alpha) over the models. Deterministic for a given seed.
WeightMatrix sample_weight_matrix(std::uint64_t seed, int num_models, double alpha);

/// Draws each model weight uniformly from the fixed grid.
ModelWeights sample_model_weights(std::uint64_t seed, int num_models);

WeightMatrix uniform_weight_matrix(int num_models);

/// Columns sum to one within tolerance, all entries nonnegative.
void validate_weight_matrix(const WeightMatrix& weights, double tolerance = 1e-9);

/// Every entry lies on the model-weight grid.
void validate_model_weights(const ModelWeights& weights);

/// Binds the two weighting stages to named model streams.
struct FusionParameters {
  WeightMatrix weight_matrix;
  ModelWeights model_weights;
  std::vector<std::string> model_ids;
  FusionMode mode = FusionMode::Dirichlet;

  int model_count() const { return static_cast<int>(weight_matrix.rows()); }

  /// Dirichlet mode stores all-one model weights; hierarchical mode
  /// requires grid values. Dimension mismatches throw.
  void validate() const;
};

FusionParameters uniform_parameters(std::vector<std::string> model_ids, FusionMode mode);

/// Elementwise first weighting, usable on any pair of 7-vector expressions.
template <typename DerivedP, typename DerivedW>
auto weight_probabilities(const Eigen::MatrixBase<DerivedP>& probabilities,
                          const Eigen::MatrixBase<DerivedW>& weights) {
  return probabilities.cwiseProduct(weights);
}

/// First weighting of one model's distribution by its weight-matrix row.
/// The result is flagged non-normalized.
ProbVector first_weighting(const ProbVector& probabilities, const Vec7& weight_row);

/// Per-class sum of the first-weighted vectors. With a column-stochastic
/// weight matrix this is a per-class convex combination of the models.
ProbVector dirichlet_fuse(std::span<const ProbVector> weighted);

/// Second weighting: per-class sum of the first-weighted vectors scaled by
/// the per-model importance weights. Linear in the weights; no clamping.
ProbVector hierarchical_fuse(std::span<const ProbVector> weighted, const ModelWeights& model_weights);

/// Full per-frame pipeline: first weighting per model, then the fuse for
/// the configured mode.
ProbVector fuse_frame(const FusionParameters& params, std::span<const ProbVector> raw);

/// Batch pipeline over aligned streams. streams[m] holds one row per frame;
/// the result holds the fused row per frame. Matches fuse_frame row by row.
StreamMatrix fuse_frames(const FusionParameters& params, std::span<const StreamMatrix> streams);

}  // namespace emofuse

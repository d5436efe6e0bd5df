#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "cvo/losses.hpp"

namespace cvo {

struct ToyFitOptions {
  int steps = 200;
  double learning_rate = 0.05;
  LossConfig loss;
  AlignmentConfig alignment{Method::fi, 10, 360.0, true};
  /// Initial per-channel scale / bias; empty means identity.
  Eigen::VectorXd initial_scale;
  Eigen::VectorXd initial_bias;
};

struct ToyFitResult {
  Eigen::VectorXd scale;
  Eigen::VectorXd bias;
  /// Mean combined loss before each step and after the last one (steps + 1 entries).
  std::vector<double> combined_trace;
  std::vector<double> triplet_trace;
  std::vector<double> angle_trace;
  /// Step at which the loss became non-finite, if it did.
  std::optional<int> diverged_at;
};

/// Gradient descent on a per-channel affine map applied to the street
/// features, minimising the mean batch triplet loss. The angle loss enters the
/// trace through the combined objective but is not differentiated.
ToyFitResult toy_fit(const TripletBatch<double>& pairs, const ToyFitOptions& options);

/// Separable toy batch: random band-limited satellite maps and street maps that
/// are the same maps rolled by a whole number of bins. A positive `shared`
/// adds one common field of that amplitude to the first half of the channels
/// of every pair, so negatives look alike until the fit suppresses those
/// channels.
TripletBatch<double> make_toy_batch(std::uint64_t seed, int pairs, int height = 4, int width = 64, int channels = 16,
                                    double shared = 0.0);

/// Random initial scale in [0.5, 1.5] and bias in [-0.5, 0.5] per channel.
void randomize_initialization(ToyFitOptions& options, std::uint64_t seed, int channels);

}  // namespace cvo

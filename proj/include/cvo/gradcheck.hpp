#pragma once

#include <cstdint>

namespace cvo {

struct GradientCheckReport {
  int trials = 0;
  long long entries = 0;
  double max_relative_error = 0.0;
  bool all_finite = true;
};

/// Central-difference check of the cosine-distance and triplet-loss gradients
/// on random [4, 8, 4] feature triplets. Relative error per entry is
/// |analytic - numeric| / max(|analytic|, |numeric|, 1e-6).
GradientCheckReport check_loss_gradients(std::uint64_t seed, int trials, double alpha, double step = 1e-5);

}  // namespace cvo

#include "cvo/gradcheck.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <random>

#include "cvo/losses.hpp"

namespace cvo {
namespace {

FeatureMapd random_map(std::mt19937_64& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  FeatureMapd map(4, 8, 4);
  for (Eigen::Index i = 0; i < map.columns().size(); ++i) map.columns().data()[i] = normal(rng);
  return map;
}

/// Perturbs `target` in place entry by entry; `f` must read it.
void compare(const FeatureMapd& analytic, FeatureMapd& target, const std::function<double(const FeatureMapd&)>& f,
             double step, GradientCheckReport& report) {
  for (Eigen::Index i = 0; i < analytic.columns().size(); ++i) {
    double& x = target.columns().data()[i];
    const double saved = x;
    x = saved + step;
    const double up = f(target);
    x = saved - step;
    const double down = f(target);
    x = saved;
    const double numeric = (up - down) / (2.0 * step);
    const double a = analytic.columns().data()[i];
    if (!std::isfinite(a) || !std::isfinite(numeric)) report.all_finite = false;
    const double rel = std::abs(a - numeric) / std::max({std::abs(a), std::abs(numeric), 1e-6});
    report.max_relative_error = std::max(report.max_relative_error, rel);
    ++report.entries;
  }
}

}  // namespace

GradientCheckReport check_loss_gradients(std::uint64_t seed, int trials, double alpha, double step) {
  require(trials >= 1, "need at least one trial");
  require(step > 0.0, "step must be positive");
  std::mt19937_64 rng(seed);
  GradientCheckReport report;
  report.trials = trials;
  for (int t = 0; t < trials; ++t) {
    FeatureMapd a = random_map(rng), p = random_map(rng), n = random_map(rng);

    const auto dist = cosine_distance_gradient(a, p);
    if (!std::isfinite(dist.value)) report.all_finite = false;
    compare(dist.d_first, a, [&](const FeatureMapd& x) { return cosine_distance(x, p); }, step, report);
    compare(dist.d_second, p, [&](const FeatureMapd& x) { return cosine_distance(a, x); }, step, report);

    const auto trip = triplet_loss_gradient(a, p, n, alpha);
    if (!std::isfinite(trip.loss)) report.all_finite = false;
    compare(trip.d_anchor, a, [&](const FeatureMapd& x) { return triplet_loss(x, p, n, alpha); }, step, report);
    compare(trip.d_positive, p, [&](const FeatureMapd& x) { return triplet_loss(a, x, n, alpha); }, step, report);
    compare(trip.d_negative, n, [&](const FeatureMapd& x) { return triplet_loss(a, p, x, alpha); }, step, report);
  }
  return report;
}

}  // namespace cvo

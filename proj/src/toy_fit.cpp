#include "cvo/toy_fit.hpp"

#include <cmath>
#include <random>

namespace cvo {
namespace {

FeatureMapd apply_affine(const FeatureMapd& map, const Eigen::VectorXd& scale, const Eigen::VectorXd& bias) {
  FeatureMapd out = map;
  for (int h = 0; h < map.height(); ++h)
    for (int w = 0; w < map.width(); ++w)
      for (int c = 0; c < map.channels(); ++c) out.at(h, w, c) = scale[c] * map.at(h, w, c) + bias[c];
  return out;
}

}  // namespace

ToyFitResult toy_fit(const TripletBatch<double>& pairs, const ToyFitOptions& options) {
  detail::check_batch(pairs);
  options.loss.validate();
  require(options.steps >= 1, "toy fit needs at least one step");
  const std::size_t n = pairs.size();
  const int channels = pairs.street.front().channels();

  ToyFitResult result;
  result.scale = options.initial_scale.size() ? options.initial_scale : Eigen::VectorXd::Ones(channels);
  result.bias = options.initial_bias.size() ? options.initial_bias : Eigen::VectorXd::Zero(channels);
  require(result.scale.size() == channels && result.bias.size() == channels, "initial parameters size mismatch");

  const double triplets = static_cast<double>(triplet_count(n));
  const double alpha = options.loss.alpha;

  for (int step = 0; step <= options.steps; ++step) {
    TripletBatch<double> current = pairs;
    for (std::size_t i = 0; i < n; ++i) current.street[i] = apply_affine(pairs.street[i], result.scale, result.bias);

    const BatchLosses losses = batch_triplets(current, options.loss, options.alignment);
    const double match = losses.match_sum() / triplets;
    const double angle = losses.angle_sum() / static_cast<double>(n);
    const double combined = combined_loss(match, angle, options.loss.beta);
    result.triplet_trace.push_back(match);
    result.angle_trace.push_back(angle);
    result.combined_trace.push_back(combined);
    if (!std::isfinite(combined)) {
      result.diverged_at = step;
      return result;
    }
    if (step == options.steps) break;

    // coefficient[i][j] multiplies dD(street_i, satellite_j')/dstreet_i
    const auto& d = losses.distance;
    std::vector<std::vector<double>> coefficient(n, std::vector<double>(n, 0.0));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j) {
        if (i == j) continue;
        const double forward = alpha * logistic(alpha * (d[i][i] - d[i][j])) / triplets;
        coefficient[i][i] += forward;
        coefficient[i][j] -= forward;
        const double backward = alpha * logistic(alpha * (d[i][i] - d[j][i])) / triplets;
        coefficient[i][i] += backward;
        coefficient[j][i] -= backward;
      }

    Eigen::VectorXd grad_scale = Eigen::VectorXd::Zero(channels);
    Eigen::VectorXd grad_bias = Eigen::VectorXd::Zero(channels);
    for (std::size_t i = 0; i < n; ++i) {
      FeatureMapd d_street(current.street[i].height(), current.street[i].width(), channels);
      for (std::size_t j = 0; j < n; ++j) {
        const double w = options.alignment.known_orientation
                             ? current.w_gt[i]
                             : estimate(current.street[i], current.satellite[j], options.alignment.method,
                                        options.alignment.scale)
                                   .w_est;
        const auto aligned = align_and_crop(current.satellite[j], w, options.alignment.fov_degrees);
        const auto g = cosine_distance_gradient(current.street[i], aligned);
        d_street.columns() += coefficient[i][j] * g.d_first.columns();
      }
      const FeatureMapd& raw = pairs.street[i];
      for (int h = 0; h < raw.height(); ++h)
        for (int w = 0; w < raw.width(); ++w)
          for (int c = 0; c < channels; ++c) {
            grad_scale[c] += d_street.at(h, w, c) * raw.at(h, w, c);
            grad_bias[c] += d_street.at(h, w, c);
          }
    }
    result.scale -= options.learning_rate * grad_scale;
    result.bias -= options.learning_rate * grad_bias;
  }
  return result;
}

TripletBatch<double> make_toy_batch(std::uint64_t seed, int pairs, int height, int width, int channels,
                                    double shared) {
  require(pairs >= 2, "toy batch needs at least two pairs");
  require(shared >= 0.0, "shared amplitude must be non-negative");
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  std::uniform_real_distribution<double> phase(0.0, 2.0 * M_PI);
  std::uniform_int_distribution<int> shift(0, width - 1);

  auto band_limited = [&](int first_channel, int last_channel) {
    FeatureMapd map(height, width, channels);
    for (int h = 0; h < height; ++h)
      for (int c = first_channel; c < last_channel; ++c)
        for (int k = 1; k <= 6; ++k) {
          const double amplitude = normal(rng) / k;
          const double phi = phase(rng);
          for (int w = 0; w < width; ++w) map.at(h, w, c) += amplitude * std::cos(2.0 * M_PI * k * w / width + phi);
        }
    return map;
  };

  const FeatureMapd common = band_limited(0, channels / 2);
  TripletBatch<double> batch;
  for (int p = 0; p < pairs; ++p) {
    FeatureMapd satellite = band_limited(0, channels);
    if (shared > 0.0) satellite.columns() += shared * common.columns();
    const int w_gt = shift(rng);
    // street[m] = satellite[m + w_gt]
    batch.street.push_back(circular_shift(satellite, -w_gt));
    batch.satellite.push_back(std::move(satellite));
    batch.w_gt.push_back(w_gt);
  }
  return batch;
}

void randomize_initialization(ToyFitOptions& options, std::uint64_t seed, int channels) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> scale(0.5, 1.5);
  std::uniform_real_distribution<double> bias(-0.5, 0.5);
  options.initial_scale.resize(channels);
  options.initial_bias.resize(channels);
  for (int c = 0; c < channels; ++c) {
    options.initial_scale[c] = scale(rng);
    options.initial_bias[c] = bias(rng);
  }
}

}  // namespace cvo

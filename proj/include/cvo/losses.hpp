#pragma once

// Training objectives: angle loss, soft-margin triplet loss on cosine
// distance, their weighted sum, and batch-all triplet enumeration.

#include <cmath>
#include <vector>

#include "cvo/correlation.hpp"
#include "cvo/feature_map.hpp"

namespace cvo {

struct LossConfig {
  double alpha = 10.0;  ///< soft-margin sharpness
  double beta = 0.3;    ///< angle-loss weight

  void validate() const {
    require(alpha > 0.0, "alpha must be positive");
    require(beta >= 0.0, "beta must be non-negative");
  }
};

/// Neumaier-compensated sum; order-independent to well below 1e-12 for loss-sized terms.
class CompensatedSum {
 public:
  void add(double x) {
    const double t = sum_ + x;
    if (std::abs(sum_) >= std::abs(x))
      compensation_ += (sum_ - t) + x;
    else
      compensation_ += (x - t) + sum_;
    sum_ = t;
  }
  double value() const { return sum_ + compensation_; }

 private:
  double sum_ = 0.0;
  double compensation_ = 0.0;
};

inline double compensated_sum(const std::vector<double>& values) {
  CompensatedSum s;
  for (double v : values) s.add(v);
  return s.value();
}

/// Angle error as a fraction of the 180 degree maximum, in feature bins.
inline double angle_loss(double w_gt, double w_est, double width) {
  require(width > 0.0, "invalid feature width: must be positive");
  const double half = 0.5 * width;
  const double d = std::fmod(std::abs(w_gt - w_est), width);
  return (half - std::abs(d - half)) / half;
}

/// ln(1 + e^x) without overflow.
inline double softplus(double x) { return std::max(x, 0.0) + std::log1p(std::exp(-std::abs(x))); }

inline double logistic(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

template <typename Scalar>
struct CosineDistanceGradient {
  Scalar value;
  FeatureMap<Scalar> d_first;
  FeatureMap<Scalar> d_second;
};

/// D = 2(1 - cos(F1, F2)), in [0, 4].
template <typename Scalar>
Scalar cosine_distance(const FeatureMap<Scalar>& first, const FeatureMap<Scalar>& second) {
  return Scalar(2) * (Scalar(1) - similarity(first, second));
}

template <typename Scalar>
CosineDistanceGradient<Scalar> cosine_distance_gradient(const FeatureMap<Scalar>& first,
                                                        const FeatureMap<Scalar>& second) {
  require(first.same_shape(second), "feature map shapes differ");
  const Scalar na = frobenius_norm(first);
  const Scalar nb = frobenius_norm(second);
  if (!(na > Scalar(0)) || !(nb > Scalar(0))) throw DegenerateInput("degenerate features: zero norm");
  const Scalar cosine = dot(first, second) / (na * nb);
  // dcos/da = b/(|a||b|) - cos a/|a|^2, and dD = -2 dcos
  FeatureMap<Scalar> da = first, db = second;
  da.columns() = Scalar(-2) * (second.columns() / (na * nb) - cosine * first.columns() / (na * na));
  db.columns() = Scalar(-2) * (first.columns() / (na * nb) - cosine * second.columns() / (nb * nb));
  return {Scalar(2) * (Scalar(1) - cosine), std::move(da), std::move(db)};
}

/// ln(1 + exp(alpha (D(A, P') - D(A, N')))).
template <typename Scalar>
double triplet_loss(const FeatureMap<Scalar>& anchor, const FeatureMap<Scalar>& positive,
                    const FeatureMap<Scalar>& negative, double alpha) {
  require(alpha > 0.0, "alpha must be positive");
  require(anchor.same_shape(positive) && anchor.same_shape(negative), "feature map shapes differ");
  const double margin = static_cast<double>(cosine_distance(anchor, positive) - cosine_distance(anchor, negative));
  return softplus(alpha * margin);
}

template <typename Scalar>
struct TripletGradient {
  double loss;
  FeatureMap<Scalar> d_anchor;
  FeatureMap<Scalar> d_positive;
  FeatureMap<Scalar> d_negative;
};

template <typename Scalar>
TripletGradient<Scalar> triplet_loss_gradient(const FeatureMap<Scalar>& anchor, const FeatureMap<Scalar>& positive,
                                              const FeatureMap<Scalar>& negative, double alpha) {
  require(alpha > 0.0, "alpha must be positive");
  require(anchor.same_shape(positive) && anchor.same_shape(negative), "feature map shapes differ");
  auto ap = cosine_distance_gradient(anchor, positive);
  auto an = cosine_distance_gradient(anchor, negative);
  const double x = alpha * static_cast<double>(ap.value - an.value);
  const Scalar g = static_cast<Scalar>(alpha * logistic(x));
  TripletGradient<Scalar> out{softplus(x), anchor, positive, negative};
  out.d_anchor.columns() = g * (ap.d_first.columns() - an.d_first.columns());
  out.d_positive.columns() = g * ap.d_second.columns();
  out.d_negative.columns() = -g * an.d_second.columns();
  return out;
}

/// L_match + beta * L_angle.
inline double combined_loss(double match_term, double angle_term, double beta) {
  require(beta >= 0.0, "beta must be non-negative");
  return match_term + beta * angle_term;
}

/// B index-paired street / satellite feature maps with ground-truth shifts.
template <typename Scalar>
struct TripletBatch {
  std::vector<FeatureMap<Scalar>> street;
  std::vector<FeatureMap<Scalar>> satellite;
  std::vector<double> w_gt;

  std::size_t size() const { return street.size(); }
};

/// How satellites are aligned to each anchor before distances are taken.
struct AlignmentConfig {
  Method method = Method::fi;
  int scale = 10;
  double fov_degrees = 360.0;
  /// Align with the ground truth instead of estimating (positives only have
  /// one; negatives are then aligned with the anchor's ground truth too).
  bool known_orientation = false;
};

struct BatchLosses {
  /// street->satellite triplets first, then satellite->street; B(B-1) each.
  std::vector<double> triplet;
  /// one per matched pair
  std::vector<double> angle;
  /// distance[i][j] = D(street_i, satellite_j aligned to street_i)
  std::vector<std::vector<double>> distance;

  double match_sum() const { return compensated_sum(triplet); }
  double angle_sum() const { return compensated_sum(angle); }
};

namespace detail {

template <typename Scalar>
void check_batch(const TripletBatch<Scalar>& batch) {
  require(batch.size() >= 2, "batch needs at least two pairs");
  require(batch.satellite.size() == batch.size() && batch.w_gt.size() == batch.size(),
          "batch street/satellite/ground-truth counts differ");
}

}  // namespace detail

/// Enumerates all 2B(B-1) triplets: each street anchor against its satellite
/// positive and the B-1 other satellites, and each satellite anchor against
/// its street positive and the B-1 other streets.
template <typename Scalar>
BatchLosses batch_triplets(const TripletBatch<Scalar>& batch, const LossConfig& config,
                           const AlignmentConfig& alignment = {}) {
  detail::check_batch(batch);
  config.validate();
  const std::size_t n = batch.size();
  BatchLosses out;
  out.distance.assign(n, std::vector<double>(n, 0.0));

  for (std::size_t i = 0; i < n; ++i) {
    const int width = batch.satellite[i].width();
    const auto query = PreparedFeatures<Scalar>::query(batch.street[i], alignment.scale, width);
    for (std::size_t j = 0; j < n; ++j) {
      double w = batch.w_gt[i];
      if (!alignment.known_orientation || i == j) {
        const auto est = estimate(query, PreparedFeatures<Scalar>::candidate(batch.satellite[j], alignment.scale),
                                  alignment.method);
        if (i == j) out.angle.push_back(angle_loss(batch.w_gt[i], est.w_est, width));
        if (!alignment.known_orientation) w = est.w_est;
      }
      const auto aligned = align_and_crop(batch.satellite[j], w, alignment.fov_degrees);
      out.distance[i][j] = static_cast<double>(cosine_distance(batch.street[i], aligned));
    }
  }

  out.triplet.reserve(2 * n * (n - 1));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) out.triplet.push_back(softplus(config.alpha * (out.distance[i][i] - out.distance[i][j])));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j)
      if (j != i) out.triplet.push_back(softplus(config.alpha * (out.distance[i][i] - out.distance[j][i])));
  return out;
}

/// Expected triplet count for batch size B.
constexpr std::size_t triplet_count(std::size_t batch_size) { return 2 * batch_size * (batch_size - 1); }

}  // namespace cvo

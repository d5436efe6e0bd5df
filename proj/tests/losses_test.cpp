#include <gtest/gtest.h>

#include <algorithm>
#include <numeric>
#include <random>

#include "cvo/gradcheck.hpp"
#include "cvo/losses.hpp"
#include "cvo/toy_fit.hpp"
#include "oracles.hpp"

namespace cvo {
namespace {

TEST(AngleLoss, Examples) {
  EXPECT_EQ(angle_loss(17.3, 17.3, 64), 0.0);
  EXPECT_EQ(angle_loss(0, 32, 64), 1.0);
  EXPECT_EQ(angle_loss(0, 48, 64), 0.5);
  EXPECT_THROW(angle_loss(0, 1, 0), std::invalid_argument);
}

TEST(AngleLoss, AgreesWithAngleDifference) {
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0.0, 64.0);
  for (int i = 0; i < 10000; ++i) {
    const double a = u(rng), b = u(rng);
    const double loss = angle_loss(a, b, 64);
    ASSERT_GE(loss, 0.0);
    ASSERT_LE(loss, 1.0);
    ASSERT_NEAR(loss, angle_loss(b, a, 64), 1e-12);
    ASSERT_NEAR(loss, angle_diff(bins_to_degrees(a, 64), bins_to_degrees(b, 64)).degrees() / 180.0, 1e-9);
  }
  EXPECT_EQ(angle_loss(3, 67, 64), 0.0);
}

TEST(CosineDistance, Examples) {
  FeatureMapd a(1, 2, 1), b(1, 2, 1);
  a.at(0, 0, 0) = 1;
  b.at(0, 1, 0) = 3;
  EXPECT_NEAR(cosine_distance(a, a), 0.0, 1e-15);
  EXPECT_NEAR(cosine_distance(a, b), 2.0, 1e-15);
  EXPECT_NEAR(cosine_distance(a, scaled(a, -2.0)), 4.0, 1e-15);
  EXPECT_THROW(cosine_distance(a, FeatureMapd(1, 2, 1)), DegenerateInput);
  FeatureMapd wide(1, 3, 1);
  wide.at(0, 0, 0) = 1;
  EXPECT_THROW(cosine_distance(a, wide), std::invalid_argument);
}

TEST(TripletLoss, FixedPointAndExtremeMargin) {
  std::mt19937_64 rng(2);
  const FeatureMapd a = oracle::random_map(rng, 2, 8, 3);
  EXPECT_NEAR(triplet_loss(a, a, a, 10.0), std::log(2.0), 1e-15);

  const double expected = std::log1p(std::exp(-40.0));
  const double value = triplet_loss(a, a, scaled(a, -1.0), 10.0);
  EXPECT_GT(value, 0.0);
  EXPECT_NEAR(value / expected, 1.0, 1e-12);
  EXPECT_NEAR(softplus(-40.0) / std::exp(-40.0), 1.0, 1e-12);
  EXPECT_EQ(softplus(1000.0), 1000.0);
  EXPECT_TRUE(std::isfinite(triplet_loss(a, scaled(a, -1.0), a, 10.0)));
  EXPECT_THROW(triplet_loss(a, a, a, 0.0), std::invalid_argument);
}

TEST(TripletLoss, MonotoneInDistances) {
  // Rotate a unit vector away from the anchor to sweep a distance upward.
  FeatureMapd anchor(1, 2, 1), base(1, 2, 1);
  anchor.at(0, 0, 0) = 1;
  auto at_angle = [](double t) {
    FeatureMapd f(1, 2, 1);
    f.at(0, 0, 0) = std::cos(t);
    f.at(0, 1, 0) = std::sin(t);
    return f;
  };
  const FeatureMapd fixed = at_angle(1.0);
  double previous_neg = INFINITY, previous_pos = -INFINITY;
  for (double t = 0.05; t < 3.1; t += 0.05) {
    const double neg = triplet_loss(anchor, fixed, at_angle(t), 2.0);
    const double pos = triplet_loss(anchor, at_angle(t), fixed, 2.0);
    EXPECT_LT(neg, previous_neg);
    EXPECT_GT(pos, previous_pos);
    previous_neg = neg;
    previous_pos = pos;
  }
}

TEST(Gradients, MatchFiniteDifferences) {
  std::mt19937_64 rng(3);
  const double h = 1e-5;
  auto relative = [](const FeatureMapd& a, const FeatureMapd& n) {
    double worst = 0.0;
    for (Eigen::Index i = 0; i < a.columns().size(); ++i) {
      const double x = a.columns().data()[i], y = n.columns().data()[i];
      worst = std::max(worst, std::abs(x - y) / std::max({std::abs(x), std::abs(y), 1e-6}));
    }
    return worst;
  };
  for (int trial = 0; trial < 100; ++trial) {
    const FeatureMapd a = oracle::random_map(rng, 4, 8, 4);
    const FeatureMapd p = oracle::random_map(rng, 4, 8, 4);
    const FeatureMapd n = oracle::random_map(rng, 4, 8, 4);

    const auto d = cosine_distance_gradient(a, p);
    EXPECT_NEAR(d.value, cosine_distance(a, p), 1e-14);
    ASSERT_LE(relative(d.d_first, oracle::numeric_gradient([&](const FeatureMapd& x) { return cosine_distance(x, p); }, a, h)), 1e-4);
    ASSERT_LE(relative(d.d_second, oracle::numeric_gradient([&](const FeatureMapd& x) { return cosine_distance(a, x); }, p, h)), 1e-4);

    const auto t = triplet_loss_gradient(a, p, n, 10.0);
    EXPECT_NEAR(t.loss, triplet_loss(a, p, n, 10.0), 1e-14);
    ASSERT_LE(relative(t.d_anchor, oracle::numeric_gradient([&](const FeatureMapd& x) { return triplet_loss(x, p, n, 10.0); }, a, h)), 1e-4);
    ASSERT_LE(relative(t.d_positive, oracle::numeric_gradient([&](const FeatureMapd& x) { return triplet_loss(a, x, n, 10.0); }, p, h)), 1e-4);
    ASSERT_LE(relative(t.d_negative, oracle::numeric_gradient([&](const FeatureMapd& x) { return triplet_loss(a, p, x, 10.0); }, n, h)), 1e-4);
  }
}

TEST(Gradients, ExtremeDistancesStayFinite) {
  std::mt19937_64 rng(4);
  const FeatureMapd a = oracle::random_map(rng, 4, 8, 4);
  const FeatureMapd far = scaled(a, -1.0);
  for (const auto& t : {triplet_loss_gradient(a, a, far, 10.0), triplet_loss_gradient(a, far, a, 10.0)}) {
    EXPECT_TRUE(std::isfinite(t.loss));
    EXPECT_TRUE(t.d_anchor.all_finite() && t.d_positive.all_finite() && t.d_negative.all_finite());
  }
}

TEST(Gradients, ReportFromLibraryChecker) {
  const GradientCheckReport r = check_loss_gradients(5, 20, 10.0);
  EXPECT_EQ(r.trials, 20);
  EXPECT_EQ(r.entries, 20LL * 5 * 128);
  EXPECT_TRUE(r.all_finite);
  EXPECT_LE(r.max_relative_error, 1e-4);
}

TEST(CombinedLoss, Examples) {
  EXPECT_DOUBLE_EQ(combined_loss(0.7, 0.5, 0.3), 0.85);
  EXPECT_EQ(combined_loss(0.7, 0.5, 0.0), 0.7);
  EXPECT_THROW(combined_loss(0.7, 0.5, -1.0), std::invalid_argument);
}

TripletBatch<double> tiny_batch(std::uint64_t seed, int size) {
  std::mt19937_64 rng(seed);
  TripletBatch<double> batch;
  for (int i = 0; i < size; ++i) {
    batch.satellite.push_back(oracle::random_map(rng, 1, 8, 2));
    batch.street.push_back(batch.satellite.back());
    batch.w_gt.push_back(0.0);
  }
  return batch;
}

TEST(BatchTriplets, Cardinality) {
  const AlignmentConfig known{Method::fi, 1, 360.0, true};
  EXPECT_EQ(batch_triplets(tiny_batch(1, 2), LossConfig{}, known).triplet.size(), 4u);
  EXPECT_EQ(triplet_count(32), 1984u);
  EXPECT_EQ(batch_triplets(tiny_batch(2, 32), LossConfig{}, known).triplet.size(), 1984u);
  for (int b = 2; b <= 64; ++b) {
    const BatchLosses l = batch_triplets(tiny_batch(b, b), LossConfig{}, known);
    ASSERT_EQ(l.triplet.size(), triplet_count(b));
    ASSERT_EQ(l.angle.size(), static_cast<std::size_t>(b));
  }
  EXPECT_THROW(batch_triplets(tiny_batch(3, 1), LossConfig{}, known), std::invalid_argument);
}

TEST(BatchTriplets, PermutationInvariance) {
  const TripletBatch<double> batch = make_toy_batch(7, 6);
  const BatchLosses base = batch_triplets(batch, LossConfig{});
  std::vector<int> order{3, 0, 5, 1, 4, 2};
  TripletBatch<double> permuted;
  for (int i : order) {
    permuted.street.push_back(batch.street[i]);
    permuted.satellite.push_back(batch.satellite[i]);
    permuted.w_gt.push_back(batch.w_gt[i]);
  }
  const BatchLosses other = batch_triplets(permuted, LossConfig{});
  EXPECT_NEAR(other.match_sum(), base.match_sum(), 1e-12 * base.match_sum());
  EXPECT_NEAR(other.angle_sum(), base.angle_sum(), 1e-12);
}

TEST(BatchTriplets, PerfectBatch) {
  // Two pairs whose streets are opposite: positives at distance 0, negatives at 4.
  std::mt19937_64 rng(8);
  TripletBatch<double> batch;
  const FeatureMapd f = oracle::random_map(rng, 4, 64, 16);
  batch.street = {f, scaled(f, -1.0)};
  batch.satellite = batch.street;
  batch.w_gt = {0.0, 0.0};
  const BatchLosses l = batch_triplets(batch, LossConfig{}, AlignmentConfig{Method::fi, 10, 360.0, true});
  EXPECT_NEAR(l.match_sum() / (triplet_count(2) * std::exp(-40.0)), 1.0, 1e-9);
  EXPECT_EQ(l.angle_sum(), 0.0);
}

TEST(ToyFit, IdentityStartIsNonIncreasing) {
  ToyFitOptions options;
  options.steps = 30;
  const ToyFitResult r = toy_fit(make_toy_batch(9, 4), options);
  ASSERT_EQ(r.combined_trace.size(), 31u);
  EXPECT_FALSE(r.diverged_at);
  EXPECT_LT(r.combined_trace.front(), 1e-6);
  for (std::size_t i = 1; i < r.combined_trace.size(); ++i)
    EXPECT_LE(r.combined_trace[i], r.combined_trace[i - 1] + 1e-9);
}

TEST(ToyFit, RandomInitImproves) {
  ToyFitOptions options;
  options.steps = 50;
  randomize_initialization(options, 10, 16);
  const ToyFitResult r = toy_fit(make_toy_batch(11, 4, 4, 64, 16, 3.0), options);
  EXPECT_FALSE(r.diverged_at);
  EXPECT_LT(r.combined_trace.back(), r.combined_trace.front());
}

TEST(ToyFit, ZeroLearningRateKeepsTraceConstant) {
  ToyFitOptions options;
  options.steps = 5;
  options.learning_rate = 0.0;
  randomize_initialization(options, 12, 16);
  const ToyFitResult r = toy_fit(make_toy_batch(13, 3), options);
  for (double v : r.combined_trace) EXPECT_EQ(v, r.combined_trace.front());
  EXPECT_EQ(r.scale, options.initial_scale);
}

TEST(ToyFit, RejectsBadArguments) {
  ToyFitOptions options;
  options.steps = 0;
  EXPECT_THROW(toy_fit(make_toy_batch(1, 2), options), std::invalid_argument);
  EXPECT_THROW(make_toy_batch(1, 1), std::invalid_argument);
  EXPECT_THROW(make_toy_batch(1, 2, 4, 64, 16, -1.0), std::invalid_argument);
}

}  // namespace
}  // namespace cvo

#pragma once

// Batch retrieval: rank every candidate overhead image for each street query
// by cosine similarity after orientation alignment.

#include <cstdint>
#include <functional>
#include <json.hpp>
#include <string>
#include <vector>

#include "cvo/correlation.hpp"
#include "cvo/evaluation.hpp"
#include "cvo/image.hpp"
#include "cvo/synthetic.hpp"

namespace cvo {

enum class OrientationMode { known, unknown };

std::string_view to_string(OrientationMode mode);
OrientationMode parse_orientation_mode(std::string_view name);

struct RetrievalConfig {
  Method method = Method::fi;
  int scale = 10;
  double fov = 360.0;
  OrientationMode orientation = OrientationMode::unknown;
  /// Number of scenes taken from the front of the input.
  int pool_size = 200;
  std::uint64_t seed = 0;
  /// Worker threads; 0 means hardware concurrency. Results never depend on it.
  int jobs = 1;

  void validate() const;
  nlohmann::json to_json() const;
};

struct RetrievalQuery {
  int id = 0;
  /// Full 360 degree street panorama; cropped to the configured field of view.
  RasterImage street;
  double w_gt = 0.0;
  double theta_gt = 0.0;
  std::string tag = "synthetic";
};

struct RetrievalCandidate {
  int id = 0;
  RasterImage overhead;
  std::string tag = "synthetic";
};

struct QueryFeatures {
  int id = 0;
  /// Street features already cropped to the configured field of view.
  FeatureMapd street;
  double w_gt = 0.0;
  double theta_gt = 0.0;
  std::string tag = "synthetic";
};

struct CandidateFeatures {
  int id = 0;
  FeatureMapd satellite;
  std::string tag = "synthetic";
};

/// Core engine over extracted features. Query i's correct match is the
/// candidate with the same id.
std::vector<EvaluationRecord> rank_and_estimate(const std::vector<QueryFeatures>& queries,
                                                const std::vector<CandidateFeatures>& candidates,
                                                const RetrievalConfig& config);

/// Extracts features from images, then ranks.
std::vector<EvaluationRecord> run_retrieval(const std::vector<RetrievalQuery>& queries,
                                            const std::vector<RetrievalCandidate>& candidates,
                                            const RetrievalConfig& config);

std::vector<EvaluationRecord> run_retrieval(const std::vector<SyntheticScene>& scenes, const RetrievalConfig& config);

/// Street-side features for a full panorama cropped to `fov` degrees.
FeatureMapd query_features(const RasterImage& street, double fov);

/// Candidate-side features: polar transform to the street panorama size, then extraction.
FeatureMapd candidate_features(const RasterImage& overhead, int pano_height, int pano_width);

/// Runs `task(i)` for i in [0, count) on up to `jobs` threads.
void parallel_for(int count, int jobs, const std::function<void(int)>& task);

}  // namespace cvo

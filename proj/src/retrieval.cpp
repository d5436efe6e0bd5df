#include "cvo/retrieval.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <functional>
#include <map>
#include <mutex>
#include <thread>

#include "cvo/features.hpp"
#include "cvo/imaging.hpp"

namespace cvo {

std::string_view to_string(OrientationMode mode) { return mode == OrientationMode::known ? "known" : "unknown"; }

OrientationMode parse_orientation_mode(std::string_view name) {
  if (name == "known") return OrientationMode::known;
  if (name == "unknown") return OrientationMode::unknown;
  throw std::invalid_argument("unknown orientation mode '" + std::string(name) + "' (expected known or unknown)");
}

void RetrievalConfig::validate() const {
  require(scale >= 1, "scale must be >= 1");
  require(fov > 0.0 && fov <= 360.0, "fov must be in (0, 360]");
  require(pool_size >= 1, "pool size must be >= 1");
  require(jobs >= 0, "jobs must be >= 0");
}

nlohmann::json RetrievalConfig::to_json() const {
  return {{"method", std::string(to_string(method))},
          {"scale", scale},
          {"fov", fov},
          {"orientation", std::string(to_string(orientation))},
          {"pool_size", pool_size},
          {"seed", seed}};
}

void parallel_for(int count, int jobs, const std::function<void(int)>& task) {
  if (jobs <= 0) jobs = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  jobs = std::min(jobs, count);
  if (jobs <= 1) {
    for (int i = 0; i < count; ++i) task(i);
    return;
  }
  std::atomic<int> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  {
    std::vector<std::jthread> workers;
    for (int t = 0; t < jobs; ++t)
      workers.emplace_back([&] {
        for (int i = next++; i < count; i = next++) {
          try {
            task(i);
          } catch (...) {
            std::lock_guard lock(failure_mutex);
            if (!failure) failure = std::current_exception();
            next = count;
          }
        }
      });
  }
  if (failure) std::rethrow_exception(failure);
}

FeatureMapd query_features(const RasterImage& street, double fov) {
  return extract_features(street.columns(0, fov_columns(street.width(), fov)));
}

FeatureMapd candidate_features(const RasterImage& overhead, int pano_height, int pano_width) {
  return extract_features(polar_transform(overhead, pano_height, pano_width));
}

namespace {

struct Scored {
  double similarity = 0.0;
  int id = 0;
  OrientationEstimate estimate;
};

/// Descending similarity, then ascending candidate id.
bool ranks_before(const Scored& a, const Scored& b) {
  if (a.similarity != b.similarity) return a.similarity > b.similarity;
  return a.id < b.id;
}

}  // namespace

std::vector<EvaluationRecord> rank_and_estimate(const std::vector<QueryFeatures>& queries,
                                                const std::vector<CandidateFeatures>& candidates,
                                                const RetrievalConfig& config) {
  config.validate();
  require(!queries.empty(), "retrieval needs at least one query");
  require(!candidates.empty(), "retrieval needs at least one candidate");

  std::map<int, std::size_t> by_id;
  for (std::size_t c = 0; c < candidates.size(); ++c)
    require(by_id.emplace(candidates[c].id, c).second, "duplicate candidate id " + std::to_string(candidates[c].id));

  const int satellite_width = candidates.front().satellite.width();
  std::vector<PreparedFeatures<double>> pool(candidates.size());
  parallel_for(static_cast<int>(candidates.size()), config.jobs, [&](int c) {
    require(candidates[c].satellite.same_shape(candidates.front().satellite), "candidate feature shapes differ");
    pool[c] = PreparedFeatures<double>::candidate(candidates[c].satellite, config.scale);
  });

  std::vector<EvaluationRecord> records(queries.size());
  parallel_for(static_cast<int>(queries.size()), config.jobs, [&](int q) {
    const QueryFeatures& query = queries[q];
    const auto truth = by_id.find(query.id);
    require(truth != by_id.end(), "query " + std::to_string(query.id) + " has no matching candidate");
    const FeatureMapd& street = query.street;
    const auto prepared = PreparedFeatures<double>::query(street, config.scale, satellite_width);

    std::vector<Scored> scored(candidates.size());
    for (std::size_t c = 0; c < candidates.size(); ++c) {
      OrientationEstimate est;
      if (config.orientation == OrientationMode::unknown) {
        est = estimate(prepared, pool[c], config.method);
      } else {
        // ground-truth alignment: only the crop is applied
        est = make_estimate<double>(0, 0.0, config.method, config.scale, satellite_width);
        est.w_est = std::fmod(query.w_gt, static_cast<double>(satellite_width));
        est.theta_est = bins_to_degrees(est.w_est, satellite_width);
      }
      const FeatureMapd aligned = align_and_crop(candidates[c].satellite, est.w_est, config.fov);
      require(aligned.width() == street.width(), "aligned satellite width differs from street feature width");
      scored[c] = {similarity(street, aligned), candidates[c].id, est};
    }

    const std::size_t t = truth->second;
    int rank = 1;
    std::size_t top = 0;
    for (std::size_t c = 0; c < scored.size(); ++c) {
      if (c != t && ranks_before(scored[c], scored[t])) ++rank;
      if (ranks_before(scored[c], scored[top])) top = c;
    }

    EvaluationRecord& r = records[q];
    r.query_id = query.id;
    r.theta_gt = query.theta_gt;
    r.theta_est = scored[t].estimate.theta_est.degrees();
    r.rank = rank;
    r.query_tag = query.tag;
    r.top1_tag = candidates[top].tag;
    r.theta_est_top1 = scored[top].estimate.theta_est.degrees();
  });
  return records;
}

std::vector<EvaluationRecord> run_retrieval(const std::vector<RetrievalQuery>& queries,
                                            const std::vector<RetrievalCandidate>& candidates,
                                            const RetrievalConfig& config) {
  config.validate();
  require(!queries.empty() && !candidates.empty(), "retrieval needs queries and candidates");
  const int pano_height = queries.front().street.height();
  const int pano_width = queries.front().street.width();

  std::vector<QueryFeatures> q(queries.size());
  std::vector<CandidateFeatures> c(candidates.size());
  parallel_for(static_cast<int>(queries.size()), config.jobs, [&](int i) {
    const RetrievalQuery& in = queries[i];
    require(in.street.height() == pano_height && in.street.width() == pano_width,
            "query " + std::to_string(in.id) + " has a different panorama size");
    try {
      q[i] = {in.id, query_features(in.street, config.fov), in.w_gt, in.theta_gt, in.tag};
    } catch (const std::exception& e) {
      throw std::runtime_error("query " + std::to_string(in.id) + ": " + e.what());
    }
  });
  parallel_for(static_cast<int>(candidates.size()), config.jobs, [&](int i) {
    c[i] = {candidates[i].id, candidate_features(candidates[i].overhead, pano_height, pano_width), candidates[i].tag};
  });
  return rank_and_estimate(q, c, config);
}

std::vector<EvaluationRecord> run_retrieval(const std::vector<SyntheticScene>& scenes, const RetrievalConfig& config) {
  config.validate();
  require(!scenes.empty(), "retrieval needs at least one scene");
  const int n = static_cast<int>(std::min<std::size_t>(scenes.size(), static_cast<std::size_t>(config.pool_size)));
  std::vector<QueryFeatures> q(n);
  std::vector<CandidateFeatures> c(n);
  parallel_for(n, config.jobs, [&](int i) {
    const SyntheticScene& s = scenes[i];
    q[i] = {s.id, query_features(s.query.image, config.fov), s.query.w_gt, s.query.theta_gt.degrees(), "synthetic"};
    c[i] = {s.id, candidate_features(s.overhead, s.query.image.height(), s.query.image.width()), "synthetic"};
  });
  return rank_and_estimate(q, c, config);
}

}  // namespace cvo

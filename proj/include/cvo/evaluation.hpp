#pragma once

// Orientation and retrieval metrics: 1-degree error histogram, mean error,
// rate below x degrees, recall@k, per-dataset hit rate, and the
// all / matched / matched-to-all evaluation modes.

#include <array>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <map>
#include <optional>
#include <set>
#include <span>
#include <string>
#include <vector>

#include "cvo/angles.hpp"

namespace cvo {

struct EvaluationRecord {
  int query_id = 0;
  double theta_gt = 0.0;   ///< degrees, south-aligned
  double theta_est = 0.0;  ///< estimate against the correct match
  int rank = 1;            ///< rank of the correct match, 1-based
  std::string query_tag = "synthetic";
  std::string top1_tag = "synthetic";
  /// Estimate against the top-ranked candidate, when it was recorded.
  std::optional<double> theta_est_top1;

  double angle_error() const { return angle_diff(theta_gt, theta_est).degrees(); }
  bool matched() const { return rank == 1; }
};

/// counts[i] holds errors in [i, i + 1) degrees; an error of exactly 180 goes
/// to the last bin.
class ErrorHistogram {
 public:
  static constexpr int kBins = 180;

  void add(double error_degrees);
  /// Count for 1-based bin i, covering [i - 1, i).
  std::int64_t bin(int i) const { return counts_.at(i - 1); }
  const std::array<std::int64_t, kBins>& counts() const { return counts_; }
  std::int64_t total() const;

  friend bool operator==(const ErrorHistogram&, const ErrorHistogram&) = default;

 private:
  std::array<std::int64_t, kBins> counts_{};
};

ErrorHistogram error_histogram(std::span<const EvaluationRecord> records);
double mean_angle_error(std::span<const EvaluationRecord> records);
/// For side-by-side comparison with median-based reporting; not a headline metric.
double median_angle_error(std::span<const EvaluationRecord> records);
/// sum_{i<=x} H_i / sum_i H_i.
double rate_below(const ErrorHistogram& histogram, int x_degrees);
double recall_at_k(std::span<const EvaluationRecord> records, int k);
/// Per query tag, fraction of queries whose top-1 candidate carries the same tag.
std::map<std::string, double> hit_rate(std::span<const EvaluationRecord> records, const std::set<std::string>& tags);
/// Query and top-1 tags seen in the records.
std::set<std::string> declared_tags(std::span<const EvaluationRecord> records);

enum class EvaluationMode { all, matched, matched_to_all };

struct Metric {
  enum class Kind { mean_error, rate_below, recall_at_k };
  Kind kind = Kind::mean_error;
  int parameter = 0;

  static Metric mean_error() { return {Kind::mean_error, 0}; }
  static Metric rate_below(int x_degrees) { return {Kind::rate_below, x_degrees}; }
  static Metric recall_at(int k) { return {Kind::recall_at_k, k}; }
};

/// all: metric over every record. matched: over rank-1 records only.
/// matched_to_all: the matched numerator divided by the full record count.
double evaluate_mode(std::span<const EvaluationRecord> records, EvaluationMode mode, Metric metric);

struct Report {
  nlohmann::json document;
  std::string histogram_csv;
};

/// JSON report plus the 180-row histogram CSV; byte-identical for equal inputs.
Report emit_report(std::span<const EvaluationRecord> records, const nlohmann::json& config, std::uint64_t seed);
void write_report(const Report& report, const std::filesystem::path& json_path, const std::filesystem::path& csv_path);

nlohmann::json records_to_json(std::span<const EvaluationRecord> records);
std::vector<EvaluationRecord> records_from_json(const nlohmann::json& document);

}  // namespace cvo

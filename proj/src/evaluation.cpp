#include "cvo/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "cvo/losses.hpp"

namespace cvo {

void ErrorHistogram::add(double error_degrees) {
  require(error_degrees >= 0.0 && error_degrees <= 180.0, "angle error outside [0, 180]");
  const int index = std::min(static_cast<int>(std::floor(error_degrees)), kBins - 1);
  ++counts_[index];
}

std::int64_t ErrorHistogram::total() const { return std::accumulate(counts_.begin(), counts_.end(), std::int64_t{0}); }

ErrorHistogram error_histogram(std::span<const EvaluationRecord> records) {
  ErrorHistogram h;
  for (const auto& r : records) h.add(r.angle_error());
  return h;
}

double mean_angle_error(std::span<const EvaluationRecord> records) {
  if (records.empty()) throw DegenerateInput("mean angle error of an empty record set");
  CompensatedSum sum;
  for (const auto& r : records) sum.add(r.angle_error());
  return sum.value() / static_cast<double>(records.size());
}

double median_angle_error(std::span<const EvaluationRecord> records) {
  if (records.empty()) throw DegenerateInput("median angle error of an empty record set");
  std::vector<double> errors;
  errors.reserve(records.size());
  for (const auto& r : records) errors.push_back(r.angle_error());
  std::sort(errors.begin(), errors.end());
  const std::size_t mid = errors.size() / 2;
  return errors.size() % 2 ? errors[mid] : 0.5 * (errors[mid - 1] + errors[mid]);
}

double rate_below(const ErrorHistogram& histogram, int x_degrees) {
  require(x_degrees >= 1 && x_degrees <= ErrorHistogram::kBins, "threshold must be in [1, 180] degrees");
  const std::int64_t total = histogram.total();
  if (total == 0) throw DegenerateInput("rate below threshold of an empty histogram");
  std::int64_t below = 0;
  for (int i = 1; i <= x_degrees; ++i) below += histogram.bin(i);
  return static_cast<double>(below) / static_cast<double>(total);
}

double recall_at_k(std::span<const EvaluationRecord> records, int k) {
  require(k >= 1, "k must be >= 1");
  if (records.empty()) return 0.0;
  const auto hits = std::count_if(records.begin(), records.end(), [k](const auto& r) { return r.rank <= k; });
  return static_cast<double>(hits) / static_cast<double>(records.size());
}

std::set<std::string> declared_tags(std::span<const EvaluationRecord> records) {
  std::set<std::string> tags;
  for (const auto& r : records) {
    tags.insert(r.query_tag);
    tags.insert(r.top1_tag);
  }
  return tags;
}

std::map<std::string, double> hit_rate(std::span<const EvaluationRecord> records, const std::set<std::string>& tags) {
  std::map<std::string, std::pair<std::int64_t, std::int64_t>> counts;
  for (const auto& r : records) {
    if (!tags.contains(r.query_tag)) throw std::invalid_argument("unknown tag '" + r.query_tag + "'");
    if (!tags.contains(r.top1_tag)) throw std::invalid_argument("unknown tag '" + r.top1_tag + "'");
    auto& [hits, total] = counts[r.query_tag];
    ++total;
    if (r.top1_tag == r.query_tag) ++hits;
  }
  std::map<std::string, double> rates;
  for (const auto& [tag, c] : counts) rates[tag] = static_cast<double>(c.first) / static_cast<double>(c.second);
  return rates;
}

namespace {

/// Numerator of a metric over `subset`, to be divided by `denominator`.
double metric_over(std::span<const EvaluationRecord> subset, Metric metric, double denominator) {
  if (denominator <= 0.0) throw DegenerateInput("metric over an empty record set");
  switch (metric.kind) {
    case Metric::Kind::mean_error: {
      CompensatedSum sum;
      for (const auto& r : subset) sum.add(r.angle_error());
      return sum.value() / denominator;
    }
    case Metric::Kind::rate_below: {
      require(metric.parameter >= 1 && metric.parameter <= ErrorHistogram::kBins,
              "threshold must be in [1, 180] degrees");
      const ErrorHistogram h = error_histogram(subset);
      std::int64_t below = 0;
      for (int i = 1; i <= metric.parameter; ++i) below += h.bin(i);
      return static_cast<double>(below) / denominator;
    }
    case Metric::Kind::recall_at_k: {
      require(metric.parameter >= 1, "k must be >= 1");
      const auto hits =
          std::count_if(subset.begin(), subset.end(), [k = metric.parameter](const auto& r) { return r.rank <= k; });
      return static_cast<double>(hits) / denominator;
    }
  }
  return 0.0;
}

}  // namespace

double evaluate_mode(std::span<const EvaluationRecord> records, EvaluationMode mode, Metric metric) {
  if (mode == EvaluationMode::all) return metric_over(records, metric, static_cast<double>(records.size()));
  std::vector<EvaluationRecord> matched;
  std::copy_if(records.begin(), records.end(), std::back_inserter(matched), [](const auto& r) { return r.matched(); });
  if (matched.empty()) throw DegenerateInput("matched evaluation with zero matched records");
  const double denominator = mode == EvaluationMode::matched ? static_cast<double>(matched.size())
                                                             : static_cast<double>(records.size());
  return metric_over(matched, metric, denominator);
}

namespace {

nlohmann::json mode_metrics(std::span<const EvaluationRecord> records, EvaluationMode mode) {
  return {
      {"mean_error_deg", evaluate_mode(records, mode, Metric::mean_error())},
      {"r_at_1", evaluate_mode(records, mode, Metric::recall_at(1))},
      {"r_at_2deg", evaluate_mode(records, mode, Metric::rate_below(2))},
      {"r_at_5deg", evaluate_mode(records, mode, Metric::rate_below(5))},
  };
}

}  // namespace

Report emit_report(std::span<const EvaluationRecord> records, const nlohmann::json& config, std::uint64_t seed) {
  if (records.empty()) throw DegenerateInput("cannot report on an empty record set");
  const ErrorHistogram histogram = error_histogram(records);
  const auto matched_count =
      std::count_if(records.begin(), records.end(), [](const auto& r) { return r.matched(); });

  nlohmann::json doc;
  doc["version"] = 1;
  doc["config"] = config;
  doc["seed"] = seed;
  doc["record_count"] = records.size();
  doc["metrics"] = {
      {"mean_error_deg", mean_angle_error(records)},
      {"median_error_deg", median_angle_error(records)},
      {"r_at_1", recall_at_k(records, 1)},
      {"r_at_2deg", rate_below(histogram, 2)},
      {"r_at_5deg", rate_below(histogram, 5)},
  };
  nlohmann::json per_mode;
  per_mode["matched_count"] = matched_count;
  per_mode["all"] = mode_metrics(records, EvaluationMode::all);
  per_mode["matched"] = matched_count ? mode_metrics(records, EvaluationMode::matched) : nlohmann::json();
  per_mode["matched_to_all"] = matched_count ? mode_metrics(records, EvaluationMode::matched_to_all) : nlohmann::json();
  doc["per_mode"] = per_mode;
  doc["hit_rates"] = hit_rate(records, declared_tags(records));

  std::ostringstream csv;
  csv << "bin_upper_degree,count\n";
  for (int i = 1; i <= ErrorHistogram::kBins; ++i) csv << i << ',' << histogram.bin(i) << '\n';
  return {std::move(doc), csv.str()};
}

void write_report(const Report& report, const std::filesystem::path& json_path, const std::filesystem::path& csv_path) {
  std::ofstream json(json_path, std::ios::binary);
  if (!json) throw std::runtime_error("cannot open " + json_path.string() + " for writing");
  json << report.document.dump(2) << '\n';
  std::ofstream csv(csv_path, std::ios::binary);
  if (!csv) throw std::runtime_error("cannot open " + csv_path.string() + " for writing");
  csv << report.histogram_csv;
  if (!json || !csv) throw std::runtime_error("failed writing report files");
}

nlohmann::json records_to_json(std::span<const EvaluationRecord> records) {
  nlohmann::json out = nlohmann::json::array();
  for (const auto& r : records) {
    nlohmann::json j = {{"query_id", r.query_id}, {"theta_gt", r.theta_gt},   {"theta_est", r.theta_est},
                        {"rank", r.rank},         {"query_tag", r.query_tag}, {"top1_tag", r.top1_tag}};
    if (r.theta_est_top1) j["theta_est_top1"] = *r.theta_est_top1;
    out.push_back(std::move(j));
  }
  return out;
}

std::vector<EvaluationRecord> records_from_json(const nlohmann::json& document) {
  if (!document.is_array()) throw FormatError("records document must be a JSON array");
  std::vector<EvaluationRecord> records;
  for (const auto& j : document) {
    EvaluationRecord r;
    try {
      r.query_id = j.at("query_id").get<int>();
      r.theta_gt = j.at("theta_gt").get<double>();
      r.theta_est = j.at("theta_est").get<double>();
      r.rank = j.at("rank").get<int>();
      r.query_tag = j.value("query_tag", std::string("synthetic"));
      r.top1_tag = j.value("top1_tag", r.query_tag);
      if (j.contains("theta_est_top1")) r.theta_est_top1 = j.at("theta_est_top1").get<double>();
    } catch (const nlohmann::json::exception& e) {
      throw FormatError(std::string("malformed evaluation record: ") + e.what());
    }
    if (r.rank < 1) throw FormatError("evaluation record rank must be >= 1");
    records.push_back(std::move(r));
  }
  return records;
}

}  // namespace cvo

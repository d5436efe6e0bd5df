#include "cvo/cli.hpp"

#include <CLI11.hpp>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <sstream>

#include "cvo/config.hpp"
#include "cvo/correlation.hpp"
#include "cvo/evaluation.hpp"
#include "cvo/features.hpp"
#include "cvo/gradcheck.hpp"
#include "cvo/imaging.hpp"
#include "cvo/retrieval.hpp"
#include "cvo/synthetic.hpp"
#include "cvo/toy_fit.hpp"

namespace fs = std::filesystem;

namespace cvo {
namespace {

constexpr int kUsageError = 2;
constexpr int kRuntimeError = 1;
constexpr const char* kSceneIndex = "scenes.csv";

std::string format_number(double v) {
  std::ostringstream s;
  s << std::setprecision(15) << v;
  return s.str();
}

struct SceneRow {
  int id = 0;
  fs::path overhead;
  fs::path street;
  int x_shift = 0;
  double w_gt = 0.0;
  double theta_gt = 0.0;
  std::string tag;
};

std::vector<SceneRow> read_scene_index(const fs::path& dir) {
  std::ifstream in(dir / kSceneIndex);
  if (!in) throw std::runtime_error("cannot open " + (dir / kSceneIndex).string());
  std::string line;
  std::getline(in, line);
  if (line != "id,overhead,street,x_shift,w_gt,theta_gt,tag")
    throw FormatError((dir / kSceneIndex).string() + ": unexpected header");
  std::vector<SceneRow> rows;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ss(line);
    for (std::string cell; std::getline(ss, cell, ',');) cells.push_back(cell);
    if (cells.size() != 7) throw FormatError((dir / kSceneIndex).string() + ": malformed row '" + line + "'");
    try {
      rows.push_back({std::stoi(cells[0]), dir / cells[1], dir / cells[2], std::stoi(cells[3]), std::stod(cells[4]),
                      std::stod(cells[5]), cells[6]});
    } catch (const std::logic_error&) {
      throw FormatError((dir / kSceneIndex).string() + ": malformed row '" + line + "'");
    }
  }
  if (rows.empty()) throw FormatError((dir / kSceneIndex).string() + ": no scenes");
  return rows;
}

nlohmann::json estimate_json(const OrientationEstimate& e) {
  return {{"w_est", e.w_est},
          {"theta_est", e.theta_est.degrees()},
          {"peak_score", e.peak_score},
          {"method", std::string(to_string(e.method))},
          {"scale", e.scale},
          {"width", e.width}};
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  out << text;
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Fine-grained orientation estimation for cross-view image matching", "cvo"};
  app.require_subcommand(1);

  std::optional<std::uint64_t> seed_flag;
  std::string config_path;
  std::optional<int> jobs_flag;
  app.add_option("--seed", seed_flag, "Random seed (default: config, then CVO_SEED, then 0)");
  app.add_option("--config", config_path, "TOML configuration file")->check(CLI::ExistingFile);
  app.add_option("--jobs", jobs_flag, "Worker threads (0 = all cores)")->check(CLI::NonNegativeNumber);

  // synth
  auto* synth = app.add_subcommand("synth", "Generate synthetic cross-view scenes into a directory");
  std::string synth_out;
  std::optional<int> synth_count;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--count", synth_count, "Number of scenes")->check(CLI::PositiveNumber);

  // polar
  auto* polar = app.add_subcommand("polar", "Polar-transform a square overhead image");
  std::string polar_in, polar_out;
  int polar_height = 128, polar_width = 512;
  polar->add_option("input", polar_in)->required()->check(CLI::ExistingFile);
  polar->add_option("output", polar_out)->required();
  polar->add_option("--height", polar_height)->check(CLI::PositiveNumber);
  polar->add_option("--width", polar_width)->check(CLI::PositiveNumber);

  // augment
  auto* augment = app.add_subcommand("augment", "Shift and crop a street panorama, printing its ground truth");
  std::string augment_in, augment_out;
  std::optional<int> augment_shift;
  double augment_fov = 360.0;
  int augment_feature_width = 64;
  augment->add_option("input", augment_in)->required()->check(CLI::ExistingFile);
  augment->add_option("--shift", augment_shift, "Clockwise shift in pixels (default: random from --seed)");
  augment->add_option("--fov", augment_fov, "Field of view in degrees");
  augment->add_option("--feature-width", augment_feature_width)->check(CLI::PositiveNumber);
  augment->add_option("--out", augment_out, "Write the shifted image here");

  // extract
  auto* extract = app.add_subcommand("extract", "Extract an FMAP1 feature map from an image");
  std::string extract_in, extract_out;
  extract->add_option("input", extract_in)->required()->check(CLI::ExistingFile);
  extract->add_option("output", extract_out)->required();

  // estimate
  auto* est = app.add_subcommand("estimate", "Estimate orientation between street and satellite FMAP1 files");
  std::string est_street, est_satellite, est_method = "fi";
  int est_scale = 10;
  est->add_option("street", est_street)->required()->check(CLI::ExistingFile);
  est->add_option("satellite", est_satellite)->required()->check(CLI::ExistingFile);
  est->add_option("--method", est_method)->check(CLI::IsMember({"fi", "cs"}));
  est->add_option("--scale", est_scale)->check(CLI::PositiveNumber);

  // retrieve
  auto* retrieve = app.add_subcommand("retrieve", "Rank a scene directory and write records JSON");
  std::string retrieve_dir, retrieve_out;
  std::optional<std::string> r_method, r_orientation;
  std::optional<int> r_scale, r_pool;
  std::optional<double> r_fov;
  retrieve->add_option("scenes", retrieve_dir, "Scene directory (see synth)")->required()->check(CLI::ExistingDirectory);
  retrieve->add_option("--out", retrieve_out, "Records JSON output")->required();
  retrieve->add_option("--method", r_method)->check(CLI::IsMember({"fi", "cs"}));
  retrieve->add_option("--scale", r_scale)->check(CLI::PositiveNumber);
  retrieve->add_option("--fov", r_fov);
  retrieve->add_option("--orientation", r_orientation)->check(CLI::IsMember({"known", "unknown"}));
  retrieve->add_option("--pool-size", r_pool)->check(CLI::PositiveNumber);

  // evaluate
  auto* evaluate = app.add_subcommand("evaluate", "Compute the metrics report from records JSON");
  std::string eval_in, eval_report = "report.json", eval_hist = "histogram.csv";
  evaluate->add_option("records", eval_in)->required()->check(CLI::ExistingFile);
  evaluate->add_option("--report", eval_report, "Report JSON output");
  evaluate->add_option("--histogram", eval_hist, "Histogram CSV output");

  // gradcheck
  auto* gradcheck = app.add_subcommand("gradcheck", "Verify loss gradients against central differences");
  int grad_trials = 100;
  double grad_alpha = 10.0, grad_tolerance = 1e-4;
  gradcheck->add_option("--trials", grad_trials)->check(CLI::PositiveNumber);
  gradcheck->add_option("--alpha", grad_alpha)->check(CLI::PositiveNumber);
  gradcheck->add_option("--tolerance", grad_tolerance)->check(CLI::PositiveNumber);

  // fit-toy
  auto* fit = app.add_subcommand("fit-toy", "Fit a per-channel affine map with the batch objective");
  int fit_steps = 200, fit_pairs = 8;
  double fit_lr = 0.05, fit_shared = 3.0;
  bool fit_random_init = false;
  fit->add_option("--steps", fit_steps)->check(CLI::PositiveNumber);
  fit->add_option("--lr", fit_lr)->check(CLI::NonNegativeNumber);
  fit->add_option("--pairs", fit_pairs)->check(CLI::Range(2, 1024));
  fit->add_option("--shared", fit_shared, "Amplitude of the field common to all pairs")
      ->check(CLI::NonNegativeNumber);
  fit->add_flag("--random-init", fit_random_init, "Start from a random affine map instead of identity");

  for (auto* sub : app.get_subcommands({})) sub->fallthrough();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kUsageError;
  }

  try {
    FileConfig file;
    if (!config_path.empty()) file = load_config(config_path);
    std::uint64_t seed = 0;
    if (seed_flag)
      seed = *seed_flag;
    else if (file.has_seed)
      seed = file.retrieval.seed;
    else if (auto env = seed_from_environment())
      seed = *env;
    RetrievalConfig rc = file.retrieval;
    rc.seed = seed;
    if (jobs_flag) rc.jobs = *jobs_flag;

    if (synth->parsed()) {
      const int count = synth_count.value_or(file.scene_count);
      fs::create_directories(synth_out);
      const SceneDimensions& dims = file.scene;
      dims.validate();
      std::ostringstream index;
      index << "id,overhead,street,x_shift,w_gt,theta_gt,tag\n";
      // one scene at a time keeps memory flat
      for (int i = 0; i < count; ++i) {
        const SyntheticScene scene = generate_scene(seed, i, dims);
        char name[64];
        std::snprintf(name, sizeof name, "overhead_%04d.png", i);
        const std::string overhead_name = name;
        std::snprintf(name, sizeof name, "street_%04d.png", i);
        const std::string street_name = name;
        write_png(scene.overhead, fs::path(synth_out) / overhead_name);
        write_png(scene.query.image, fs::path(synth_out) / street_name);
        index << i << ',' << overhead_name << ',' << street_name << ',' << scene.query.x_shift << ','
              << format_number(scene.query.w_gt) << ',' << format_number(scene.query.theta_gt.degrees())
              << ",synthetic\n";
      }
      write_text(fs::path(synth_out) / kSceneIndex, index.str());
      out << "wrote " << count << " scenes to " << synth_out << '\n';
    } else if (polar->parsed()) {
      write_png(polar_transform(read_png(polar_in), polar_height, polar_width), polar_out);
    } else if (augment->parsed()) {
      const RasterImage image = read_png(augment_in);
      const ShiftResult r = augment_shift ? shift_and_crop(image, *augment_shift, augment_fov, augment_feature_width)
                                          : random_shift(image, seed, augment_fov, augment_feature_width);
      if (!augment_out.empty()) write_png(r.image, augment_out);
      out << "x_shift=" << r.x_shift << '\n'
          << "w_gt=" << format_number(r.w_gt) << '\n'
          << "theta_gt=" << format_number(r.theta_gt.degrees()) << '\n';
    } else if (extract->parsed()) {
      write_fmap(extract_features(read_png(extract_in)).cast<float>(), extract_out);
    } else if (est->parsed()) {
      const FeatureMapd street = read_fmap(est_street).cast<double>();
      const FeatureMapd satellite = read_fmap(est_satellite).cast<double>();
      out << estimate_json(estimate(street, satellite, parse_method(est_method), est_scale)).dump(2) << '\n';
    } else if (retrieve->parsed()) {
      if (r_method) rc.method = parse_method(*r_method);
      if (r_scale) rc.scale = *r_scale;
      if (r_fov) rc.fov = *r_fov;
      if (r_orientation) rc.orientation = parse_orientation_mode(*r_orientation);
      if (r_pool) rc.pool_size = *r_pool;
      rc.validate();
      auto rows = read_scene_index(retrieve_dir);
      if (rows.size() > static_cast<std::size_t>(rc.pool_size)) rows.resize(rc.pool_size);

      std::vector<QueryFeatures> queries(rows.size());
      std::vector<CandidateFeatures> candidates(rows.size());
      parallel_for(static_cast<int>(rows.size()), rc.jobs, [&](int i) {
        const SceneRow& row = rows[i];
        const RasterImage street = read_png(row.street);
        try {
          queries[i] = {row.id, query_features(street, rc.fov), row.w_gt, row.theta_gt, row.tag};
        } catch (const std::exception& e) {
          throw std::runtime_error("query " + std::to_string(row.id) + ": " + e.what());
        }
        candidates[i] = {row.id, candidate_features(read_png(row.overhead), street.height(), street.width()), row.tag};
      });
      const auto records = rank_and_estimate(queries, candidates, rc);
      write_text(retrieve_out, records_to_json(records).dump(2) + "\n");
      out << "wrote " << records.size() << " records to " << retrieve_out << '\n';
    } else if (evaluate->parsed()) {
      std::ifstream in(eval_in);
      nlohmann::json doc;
      try {
        doc = nlohmann::json::parse(in);
      } catch (const nlohmann::json::parse_error& e) {
        throw FormatError(eval_in + ": " + e.what());
      }
      const auto records = records_from_json(doc);
      write_report(emit_report(records, rc.to_json(), seed), eval_report, eval_hist);
      out << "wrote " << eval_report << " and " << eval_hist << '\n';
    } else if (gradcheck->parsed()) {
      const GradientCheckReport r = check_loss_gradients(seed, grad_trials, grad_alpha);
      const bool pass = r.all_finite && r.max_relative_error <= grad_tolerance;
      out << nlohmann::json{{"trials", r.trials},
                            {"entries", r.entries},
                            {"max_relative_error", r.max_relative_error},
                            {"all_finite", r.all_finite},
                            {"tolerance", grad_tolerance},
                            {"pass", pass}}
                 .dump(2)
          << '\n';
      if (!pass) {
        err << "gradient check failed\n";
        return kRuntimeError;
      }
    } else if (fit->parsed()) {
      const auto batch = make_toy_batch(seed, fit_pairs, 4, 64, 16, fit_shared);
      ToyFitOptions options;
      options.steps = fit_steps;
      options.learning_rate = fit_lr;
      if (fit_random_init) randomize_initialization(options, derive_seed(seed, 1), batch.street.front().channels());
      const ToyFitResult r = toy_fit(batch, options);
      out << nlohmann::json{{"steps", fit_steps},
                            {"learning_rate", fit_lr},
                            {"initial_loss", r.combined_trace.front()},
                            {"final_loss", r.combined_trace.back()},
                            {"combined_trace", r.combined_trace},
                            {"triplet_trace", r.triplet_trace},
                            {"angle_trace", r.angle_trace}}
                 .dump(2)
          << '\n';
      if (r.diverged_at) {
        err << "toy fit diverged at step " << *r.diverged_at << '\n';
        return kRuntimeError;
      }
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kRuntimeError;
  }
  return 0;
}

}  // namespace cvo

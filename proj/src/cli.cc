#include "stereorect/cli.h"

#include <CLI11.hpp>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <memory>
#include <optional>
#include <regex>
#include <sstream>
#include <thread>

#include "stereorect/error.h"
#include "stereorect/imaging.h"
#include "stereorect/io.h"
#include "stereorect/matching.h"
#include "stereorect/optimizer.h"
#include "stereorect/synthgen.h"

namespace stereorect {
namespace {

namespace fs = std::filesystem;

constexpr const char* kMatchesSuffix = ".matches.json";
constexpr const char* kTruthSuffix = ".truth.json";

int exit_code_for(ErrorCode code) {
  switch (code) {
    case ErrorCode::kParse:
    case ErrorCode::kInvalidArgument:
    case ErrorCode::kIo:
      return kExitUsage;
    case ErrorCode::kInsufficientInliers:
    case ErrorCode::kDegenerateConfiguration:
    case ErrorCode::kTooFewVisiblePoints:
      return kExitData;
    default:
      return kExitSolver;
  }
}

RigDims parse_dims(const std::string& text) {
  static const std::regex kPattern(R"(^(\d+)x(\d+)$)");
  std::smatch m;
  if (!std::regex_match(text, m, kPattern)) {
    throw Error(ErrorCode::kInvalidArgument, "--dims must look like 1920x1080");
  }
  RigDims dims{std::stod(m[1].str()), std::stod(m[2].str())};
  if (!dims.valid()) throw Error(ErrorCode::kInvalidArgument, "--dims must be positive");
  return dims;
}

// Solver and RANSAC flags shared by rectify and eval.
class SolveFlags {
 public:
  void attach(CLI::App* app) {
    app->add_option("--mode", mode_, "Solver mode")
        ->check(CLI::IsMember({"usr", "usr-cgd"}))
        ->default_str("usr-cgd");
    app->add_option("--config", config_,
                    "JSON config file (fallback: $STEREORECT_CONFIG)");
    seed_ = app->add_option("--seed,--ransac-seed", seed_value_, "RANSAC seed");
    app->add_flag("--no-ransac", no_ransac_,
                  "Use every correspondence without outlier filtering");
    add<double>(app, "--ransac-threshold", "RANSAC inlier threshold in pixels",
                [](double v, SolverConfig&, RansacConfig& r) { r.inlier_threshold = v; });
    add<int>(app, "--ransac-iters", "RANSAC iteration cap",
             [](int v, SolverConfig&, RansacConfig& r) { r.max_iterations = v; });
    add<double>(app, "--ransac-confidence", "RANSAC stopping confidence",
                [](double v, SolverConfig&, RansacConfig& r) { r.confidence = v; });
    add<int>(app, "--max-outer-iters", "Outer reweighting rounds",
             [](int v, SolverConfig& s, RansacConfig&) { s.max_outer_iters = v; });
    add<int>(app, "--max-inner-iters", "Trust-region iteration cap",
             [](int v, SolverConfig& s, RansacConfig&) { s.inner.max_iterations = v; });
    add<double>(app, "--initial-radius", "Initial trust-region radius",
                [](double v, SolverConfig& s, RansacConfig&) { s.inner.initial_radius = v; });
    add<double>(app, "--gradient-tolerance", "Trust-region gradient tolerance",
                [](double v, SolverConfig& s, RansacConfig&) {
                  s.inner.gradient_tolerance = v;
                });
    add<double>(app, "--step-tolerance", "Trust-region step tolerance",
                [](double v, SolverConfig& s, RansacConfig&) { s.inner.step_tolerance = v; });
    add<double>(app, "--fd-step", "Relative finite-difference step",
                [](double v, SolverConfig& s, RansacConfig&) {
                  s.inner.relative_fd_step = v;
                });
    add<double>(app, "--ar-min", "Lower aspect-ratio bound",
                [](double v, SolverConfig& s, RansacConfig&) { s.thresholds.ar_min = v; });
    add<double>(app, "--ar-max", "Upper aspect-ratio bound",
                [](double v, SolverConfig& s, RansacConfig&) { s.thresholds.ar_max = v; });
    add<double>(app, "--sk-max", "Skewness bound in degrees",
                [](double v, SolverConfig& s, RansacConfig&) { s.thresholds.sk_max = v; });
    add<double>(app, "--sr-min", "Lower size-ratio bound",
                [](double v, SolverConfig& s, RansacConfig&) { s.thresholds.sr_min = v; });
    add<double>(app, "--sr-max", "Upper size-ratio bound",
                [](double v, SolverConfig& s, RansacConfig&) { s.thresholds.sr_max = v; });
    add<double>(app, "--r-max", "Rotation bound in degrees",
                [](double v, SolverConfig& s, RansacConfig&) { s.thresholds.r_max = v; });
  }

  //! Defaults, then the config file, then explicit flags.
  void resolve(SolverConfig& solver, RansacConfig& ransac) {
    solver = SolverConfig{};
    ransac = RansacConfig{};
    config_path_ = config_;
    if (config_path_.empty()) {
      if (const char* env = std::getenv("STEREORECT_CONFIG")) config_path_ = env;
    }
    if (!config_path_.empty()) apply_config(read_json_file(config_path_), solver, ransac);
    if (!mode_.empty()) solver.mode = parse_solver_mode(mode_);
    if (seed_->count() > 0) ransac.seed = seed_value_;
    for (const auto& apply : overrides_) apply(solver, ransac);
    solver.validate();
    ransac.validate();
  }

  bool use_ransac() const { return !no_ransac_; }
  const std::string& config_path() const { return config_path_; }

 private:
  template <class T>
  void add(CLI::App* app, const std::string& name, const std::string& desc,
           std::function<void(T, SolverConfig&, RansacConfig&)> set) {
    auto value = std::make_shared<T>();
    CLI::Option* opt = app->add_option(name, *value, desc);
    overrides_.push_back([opt, value, set](SolverConfig& s, RansacConfig& r) {
      if (opt->count() > 0) set(*value, s, r);
    });
  }

  std::string mode_;
  std::string config_;
  std::string config_path_;
  std::uint64_t seed_value_ = 0;
  CLI::Option* seed_ = nullptr;
  bool no_ransac_ = false;
  std::vector<std::function<void(SolverConfig&, RansacConfig&)>> overrides_;
};

struct PipelineOutput {
  std::optional<RansacResult> ransac;
  CorrespondenceSet inliers;
  SolveResult solution;
};

PipelineOutput run_pipeline(const CorrespondenceSet& matches, const SolverConfig& solver,
                            const RansacConfig& ransac, bool use_ransac) {
  PipelineOutput out;
  if (use_ransac) {
    out.ransac = ransac_filter(matches, ransac);
    out.inliers = out.ransac->inliers;
  } else {
    out.inliers = matches;
  }
  out.solution = solve(out.inliers, solver);
  return out;
}

Json ransac_json(const PipelineOutput& p, const RansacConfig& cfg, std::size_t total) {
  if (!p.ransac) return Json{{"enabled", false}, {"input_pairs", total}};
  return Json{{"enabled", true},
              {"seed", cfg.seed},
              {"inlier_threshold", cfg.inlier_threshold},
              {"input_pairs", total},
              {"inliers", p.ransac->inliers.size()},
              {"iterations", p.ransac->iterations},
              {"F", to_json(p.ransac->F)},
              {"inlier_indices", p.ransac->inlier_indices}};
}

CorrespondenceSet read_matches(const fs::path& path) {
  return correspondences_from_json(read_json_file(path));
}

// ---------------------------------------------------------------------------

int cmd_synth(const std::string& out_dir, const std::string& dims_text,
              std::uint64_t seed, const SuiteOptions& options, std::ostream& out) {
  const RigDims dims = parse_dims(dims_text);
  if (options.n_points < 8 || !(options.noise_sigma >= 0.0) ||
      !(options.outlier_fraction >= 0.0 && options.outlier_fraction < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument, "invalid suite options");
  }
  const std::vector<SuiteCase> suite = make_suite(dims, seed, options);

  RunManifest manifest;
  manifest.command = "synth";
  manifest.seed = seed;
  manifest.output_dir = out_dir;
  const Json manifest_json = to_json(manifest);

  fs::create_directories(out_dir);
  Json names = Json::array();
  for (const SuiteCase& sc : suite) {
    Json matches = to_json(sc.matches);
    matches["manifest"] = manifest_json;
    write_json_file(fs::path(out_dir) / (sc.name + kMatchesSuffix), matches);
    Json truth{{"manifest", manifest_json}, {"case", sc.name}};
    truth.update(to_json(sc.truth));
    write_json_file(fs::path(out_dir) / (sc.name + kTruthSuffix), truth);
    names.push_back(sc.name);
  }
  write_json_file(fs::path(out_dir) / "manifest.json",
                  Json{{"manifest", manifest_json},
                       {"width", dims.width},
                       {"height", dims.height},
                       {"points", options.n_points},
                       {"noise_sigma", options.noise_sigma},
                       {"outlier_fraction", options.outlier_fraction},
                       {"cases", names}});
  out << "wrote " << suite.size() << " cases to " << out_dir << "\n";
  return kExitOk;
}

struct RectifyArgs {
  std::string matches;
  std::string out;
  std::string left;
  std::string right;
  int scanlines = 10;
  bool autofit = false;
};

void write_images(const RectifyArgs& args, const RasterImage& left,
                  const RasterImage& right, const PipelineOutput& p) {
  const HomographyPair& H = p.solution.homographies;
  FittedWarp wl{H.left, left.width(), left.height()};
  FittedWarp wr{H.right, right.width(), right.height()};
  if (args.autofit) {
    std::tie(wl, wr) = auto_fit_pair(H.left, H.right, left.width(), left.height());
  }
  const RasterImage rl = warp(left, wl.H, wl.width, wl.height);
  const RasterImage rr = warp(right, wr.H, wr.width, wr.height);
  CorrespondenceSet rectified;
  rectified.dims = RigDims{static_cast<double>(wl.width), static_cast<double>(wl.height)};
  for (const auto& m : p.inliers.pairs) {
    const Vec2 a = transform_point(wl.H, Vec2(m.ul, m.vl));
    const Vec2 b = transform_point(wr.H, Vec2(m.ur, m.vr));
    rectified.pairs.push_back({a.x(), a.y(), b.x(), b.y()});
  }
  const fs::path dir(args.out);
  write_png(dir / "rectified_left.png", rl);
  write_png(dir / "rectified_right.png", rr);
  write_png(dir / "overlay.png", overlay_scanlines(rl, rr, rectified, args.scanlines));
}

int cmd_rectify(const RectifyArgs& args, SolveFlags& flags, std::ostream& out,
                std::ostream& err) {
  SolverConfig solver;
  RansacConfig ransac;
  flags.resolve(solver, ransac);
  if (args.scanlines < 0) throw Error(ErrorCode::kInvalidArgument, "--scanlines must be >= 0");
  if (args.left.empty() != args.right.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "--left and --right go together");
  }

  // Every input is loaded before anything is written.
  const CorrespondenceSet matches = read_matches(args.matches);
  std::optional<RasterImage> left, right;
  if (!args.left.empty()) {
    left = read_image(args.left);
    right = read_image(args.right);
    if (left->width() != right->width() || left->height() != right->height() ||
        left->width() != static_cast<int>(matches.dims.width) ||
        left->height() != static_cast<int>(matches.dims.height)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "image sizes must match the correspondence file dimensions");
    }
  }

  RunManifest manifest;
  manifest.command = "rectify";
  manifest.inputs = {args.matches};
  if (left) {
    manifest.inputs.push_back(args.left);
    manifest.inputs.push_back(args.right);
  }
  manifest.config_path = flags.config_path();
  manifest.mode = std::string(to_string(solver.mode));
  manifest.seed = ransac.seed;
  manifest.output_dir = args.out;

  PipelineOutput p;
  if (flags.use_ransac()) {
    try {
      p.ransac = ransac_filter(matches, ransac);
    } catch (const Error& e) {
      err << "error: " << e.what() << "\n";
      return exit_code_for(e.code());
    }
    p.inliers = p.ransac->inliers;
  } else {
    p.inliers = matches;
  }

  const fs::path dir(args.out);
  try {
    p.solution = solve(p.inliers, solver);
  } catch (const Error& e) {
    fs::create_directories(dir);
    Json doc{{"manifest", to_json(manifest)},
             {"mode", manifest.mode},
             {"error", e.what()},
             {"ransac", ransac_json(p, ransac, matches.size())},
             {"trace", to_json(SolveTrace{})}};
    write_json_file(dir / "result.json", doc);
    write_text_file(dir / "trace.jsonl", "");
    err << "error: solver failed: " << e.what() << "\n";
    return kExitSolver;
  }

  fs::create_directories(dir);
  const SolveResult& s = p.solution;
  Json doc{{"manifest", to_json(manifest)},
           {"mode", manifest.mode},
           {"H_l", to_json(s.homographies.left)},
           {"H_r", to_json(s.homographies.right)},
           {"params", to_json(s.params)},
           {"report", to_json(s.report)},
           {"ransac", ransac_json(p, ransac, matches.size())},
           {"trace", to_json(s.trace)}};
  write_json_file(dir / "result.json", doc);
  write_text_file(dir / "trace.jsonl", trace_json_lines(s.trace));
  if (left) write_images(args, *left, *right, p);

  for (const auto& w : s.trace.warnings) err << "warning: " << w << "\n";
  char line[160];
  std::snprintf(line, sizeof(line), "%s: %zu/%zu inliers, E_v %.4f px, %zu round(s), %s\n",
                manifest.mode.c_str(), p.inliers.size(), matches.size(),
                s.report.vertical_disparity, s.trace.rounds.size(),
                std::string(to_string(s.trace.termination)).c_str());
  out << line;
  return kExitOk;
}

// ---------------------------------------------------------------------------

struct EvalArgs {
  std::string dir;
  int seeds = 3;
  int jobs = 0;
  std::string csv;
};

struct CaseRow {
  std::string name;
  double e_v = 0, e_o = 0, e_sk = 0, e_ar = 0, e_r = 0, e_sr = 0;
};

struct TaskOutcome {
  std::optional<DistortionReport> report;
  int exit_code = kExitOk;
  std::string message;
};

int cmd_eval(const EvalArgs& args, SolveFlags& flags, std::ostream& out,
             std::ostream& err) {
  SolverConfig solver;
  RansacConfig ransac;
  flags.resolve(solver, ransac);
  if (args.seeds < 1) throw Error(ErrorCode::kInvalidArgument, "--seeds must be >= 1");
  if (args.jobs < 0) throw Error(ErrorCode::kInvalidArgument, "--jobs must be >= 0");
  if (!fs::is_directory(args.dir)) {
    throw Error(ErrorCode::kIo, "not a directory: " + args.dir);
  }

  std::vector<std::pair<std::string, fs::path>> files;
  for (const auto& entry : fs::directory_iterator(args.dir)) {
    const std::string fname = entry.path().filename().string();
    const std::string suffix = kMatchesSuffix;
    if (entry.is_regular_file() && fname.size() > suffix.size() &&
        fname.compare(fname.size() - suffix.size(), suffix.size(), suffix) == 0) {
      files.emplace_back(fname.substr(0, fname.size() - suffix.size()), entry.path());
    }
  }
  if (files.empty()) {
    throw Error(ErrorCode::kInvalidArgument, std::string("no *") + kMatchesSuffix + " files in " + args.dir);
  }
  std::sort(files.begin(), files.end());
  std::vector<CorrespondenceSet> cases;
  for (const auto& f : files) cases.push_back(read_matches(f.second));

  const std::size_t n_tasks = cases.size() * static_cast<std::size_t>(args.seeds);
  std::vector<TaskOutcome> outcomes(n_tasks);
  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t t = next++; t < n_tasks; t = next++) {
      const std::size_t ci = t / static_cast<std::size_t>(args.seeds);
      RansacConfig rc = ransac;
      rc.seed = ransac.seed + t % static_cast<std::size_t>(args.seeds);
      try {
        outcomes[t].report =
            run_pipeline(cases[ci], solver, rc, flags.use_ransac()).solution.report;
      } catch (const Error& e) {
        outcomes[t].exit_code = exit_code_for(e.code());
        outcomes[t].message = e.what();
      }
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const std::size_t n_threads = std::min<std::size_t>(
      n_tasks, args.jobs > 0 ? static_cast<std::size_t>(args.jobs) : hw);
  std::vector<std::thread> pool;
  for (std::size_t i = 1; i < n_threads; ++i) pool.emplace_back(worker);
  worker();
  for (auto& th : pool) th.join();

  std::vector<CaseRow> rows;
  int status = kExitOk;
  for (std::size_t ci = 0; ci < cases.size(); ++ci) {
    CaseRow row{files[ci].first};
    bool ok = true;
    for (int s = 0; s < args.seeds; ++s) {
      const TaskOutcome& o = outcomes[ci * static_cast<std::size_t>(args.seeds) +
                                      static_cast<std::size_t>(s)];
      if (!o.report) {
        err << files[ci].first << " (seed " << ransac.seed + static_cast<std::uint64_t>(s)
            << "): " << o.message << "\n";
        if (status == kExitOk) status = o.exit_code;
        ok = false;
        continue;
      }
      const DistortionReport& r = *o.report;
      row.e_v += r.vertical_disparity / args.seeds;
      row.e_o += r.mean.orthogonality / args.seeds;
      row.e_sk += r.mean.skewness / args.seeds;
      row.e_ar += r.mean.modified_aspect_ratio / args.seeds;
      row.e_r += r.mean.rotation / args.seeds;
      row.e_sr += r.mean.size_ratio / args.seeds;
    }
    if (ok) rows.push_back(row);
  }

  CaseRow mean{"Mean"};
  for (const auto& r : rows) {
    const double k = 1.0 / static_cast<double>(rows.size());
    mean.e_v += k * r.e_v;
    mean.e_o += k * r.e_o;
    mean.e_sk += k * r.e_sk;
    mean.e_ar += k * r.e_ar;
    mean.e_r += k * r.e_r;
    mean.e_sr += k * r.e_sr;
  }
  if (!rows.empty()) rows.push_back(mean);

  std::size_t name_width = 4;
  for (const auto& r : rows) name_width = std::max(name_width, r.name.size());
  const int nw = static_cast<int>(name_width);
  char line[256];
  out << "mode " << to_string(solver.mode) << ", " << args.seeds << " seed(s)\n";
  std::snprintf(line, sizeof(line), "%-*s %9s %9s %9s %9s %9s %9s\n", nw, "case", "E_v",
                "E_O", "E_Sk", "E_AR", "E_R", "E_SR");
  out << line;
  std::ostringstream csv;
  csv << "case,e_v,e_o,e_sk,e_ar,e_r,e_sr\n";
  for (const auto& r : rows) {
    std::snprintf(line, sizeof(line), "%-*s %9.4f %9.3f %9.3f %9.4f %9.3f %9.4f\n", nw,
                  r.name.c_str(), r.e_v, r.e_o, r.e_sk, r.e_ar, r.e_r, r.e_sr);
    out << line;
    std::snprintf(line, sizeof(line), "%s,%.6f,%.6f,%.6f,%.6f,%.6f,%.6f\n", r.name.c_str(),
                  r.e_v, r.e_o, r.e_sk, r.e_ar, r.e_r, r.e_sr);
    csv << line;
  }
  out << "\n" << csv.str();
  if (!args.csv.empty()) write_text_file(args.csv, csv.str());
  return status;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err) {
  CLI::App app{"Uncalibrated stereo rectification", "stereorect"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kToolVersion);

  CLI::App* synth = app.add_subcommand("synth", "Generate the synthetic benchmark suite");
  std::string synth_out, dims = "1920x1080";
  std::uint64_t synth_seed = 0;
  SuiteOptions suite_options;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--dims", dims, "Image size WxH")->capture_default_str();
  synth->add_option("--seed", synth_seed, "Suite seed")->capture_default_str();
  synth->add_option("--points", suite_options.n_points, "Correspondences per case")
      ->capture_default_str();
  synth->add_option("--noise", suite_options.noise_sigma, "Pixel noise sigma")
      ->capture_default_str();
  synth->add_option("--outliers", suite_options.outlier_fraction, "Outlier fraction")
      ->capture_default_str();

  CLI::App* rectify = app.add_subcommand("rectify", "Rectify one set of correspondences");
  RectifyArgs rectify_args;
  SolveFlags rectify_flags;
  rectify->add_option("--matches", rectify_args.matches, "Correspondence JSON")->required();
  rectify->add_option("--out", rectify_args.out, "Output directory")->required();
  rectify->add_option("--left", rectify_args.left, "Left image (.png or .ppm)");
  rectify->add_option("--right", rectify_args.right, "Right image (.png or .ppm)");
  rectify->add_option("--scanlines", rectify_args.scanlines, "Overlay scanline count")
      ->capture_default_str();
  rectify->add_flag("--autofit", rectify_args.autofit,
                    "Size warped images to contain every mapped corner");
  rectify_flags.attach(rectify);

  CLI::App* eval = app.add_subcommand("eval", "Evaluate a suite directory");
  EvalArgs eval_args;
  SolveFlags eval_flags;
  eval->add_option("dir", eval_args.dir, "Suite directory")->required();
  eval->add_option("--seeds", eval_args.seeds, "RANSAC seeds per case")->capture_default_str();
  eval->add_option("--jobs", eval_args.jobs, "Parallel workers (0 = all cores)")
      ->capture_default_str();
  eval->add_option("--csv", eval_args.csv, "Also write the CSV to this file");
  eval_flags.attach(eval);

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    if (code == 0) return kExitOk;
    for (CLI::App* sub : {synth, rectify, eval}) {
      if (sub->parsed()) err << sub->help();
    }
    return kExitUsage;
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_out, dims, synth_seed, suite_options, out);
    if (rectify->parsed()) return cmd_rectify(rectify_args, rectify_flags, out, err);
    return cmd_eval(eval_args, eval_flags, out, err);
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return exit_code_for(e.code());
  } catch (const fs::filesystem_error& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  }
}

}  // namespace stereorect

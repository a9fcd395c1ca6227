#include "stereorect/io.h"

#include <cstdio>
#include <fstream>
#include <sstream>

#include "stereorect/error.h"

namespace stereorect {
namespace {

// (name, member) table shared by the RectParams reader and writer.
constexpr std::pair<const char*, double RectParams::*> kParamFields[] = {
    {"theta_yl", &RectParams::theta_yl}, {"theta_zl", &RectParams::theta_zl},
    {"theta_xr", &RectParams::theta_xr}, {"theta_yr", &RectParams::theta_yr},
    {"theta_zr", &RectParams::theta_zr}, {"t_yl", &RectParams::t_yl},
    {"t_yr", &RectParams::t_yr},         {"delta_fl", &RectParams::delta_fl},
    {"delta_fr", &RectParams::delta_fr},
};

[[noreturn]] void parse_error(const std::string& what) {
  throw Error(ErrorCode::kParse, what);
}

double number(const Json& j, const char* what) {
  if (!j.is_number()) parse_error(std::string(what) + " must be a number");
  return j.get<double>();
}

int integer(const Json& j, const char* what) {
  if (!j.is_number_integer()) parse_error(std::string(what) + " must be an integer");
  return j.get<int>();
}

void check_keys(const Json& j, std::initializer_list<const char*> allowed,
                const char* what) {
  if (!j.is_object()) parse_error(std::string(what) + " must be an object");
  for (const auto& item : j.items()) {
    bool known = false;
    for (const char* k : allowed) known = known || item.key() == k;
    if (!known) parse_error("unknown key '" + item.key() + "' in " + what);
  }
}

Json side_json(const SideDistortion& s) {
  return Json{{"e_o", s.orthogonality},        {"e_a", s.aspect_ratio},
              {"e_ar", s.modified_aspect_ratio}, {"e_sk", s.skewness},
              {"e_r", s.rotation},             {"e_sr", s.size_ratio}};
}

Json camera_json(const CameraSetup& cam) {
  return Json{{"alpha", cam.intrinsics.alpha},
              {"rotation", to_json(cam.pose.rotation)},
              {"center",
               {cam.pose.optical_center().x(), cam.pose.optical_center().y(),
                cam.pose.optical_center().z()}}};
}

}  // namespace

Json to_json(const RunManifest& m) {
  return Json{{"command", m.command},       {"inputs", m.inputs},
              {"config_path", m.config_path}, {"mode", m.mode},
              {"seed", m.seed},             {"output_dir", m.output_dir},
              {"tool_version", m.tool_version}};
}

Json to_json(const CorrespondenceSet& c) {
  Json pairs = Json::array();
  for (const auto& p : c.pairs) pairs.push_back({p.ul, p.vl, p.ur, p.vr});
  return Json{{"width", c.dims.width}, {"height", c.dims.height},
              {"pairs", std::move(pairs)}};
}

CorrespondenceSet correspondences_from_json(const Json& j) {
  check_keys(j, {"width", "height", "pairs", "manifest"}, "correspondence file");
  if (!j.contains("width") || !j.contains("height") || !j.contains("pairs")) {
    parse_error("correspondence file needs width, height and pairs");
  }
  CorrespondenceSet c;
  c.dims.width = number(j["width"], "width");
  c.dims.height = number(j["height"], "height");
  const Json& pairs = j["pairs"];
  if (!pairs.is_array()) parse_error("pairs must be an array");
  c.pairs.reserve(pairs.size());
  for (const Json& p : pairs) {
    if (!p.is_array() || p.size() != 4) parse_error("each pair must be [ul, vl, ur, vr]");
    c.pairs.push_back({number(p[0], "ul"), number(p[1], "vl"), number(p[2], "ur"),
                       number(p[3], "vr")});
  }
  c.validate();
  return c;
}

Json to_json(const Mat3& m) {
  Json rows = Json::array();
  for (int r = 0; r < 3; ++r) rows.push_back({m(r, 0), m(r, 1), m(r, 2)});
  return rows;
}

Mat3 mat3_from_json(const Json& j) {
  if (!j.is_array() || j.size() != 3) parse_error("matrix must have 3 rows");
  Mat3 m;
  for (int r = 0; r < 3; ++r) {
    const Json& row = j[static_cast<std::size_t>(r)];
    if (!row.is_array() || row.size() != 3) parse_error("matrix rows must have 3 entries");
    for (int c = 0; c < 3; ++c) m(r, c) = number(row[static_cast<std::size_t>(c)], "entry");
  }
  return m;
}

Json to_json(const RectParams& p) {
  Json j = Json::object();
  for (const auto& [name, field] : kParamFields) j[name] = p.*field;
  return j;
}

RectParams rect_params_from_json(const Json& j) {
  if (!j.is_object()) parse_error("params must be an object");
  RectParams p;
  for (const auto& [name, field] : kParamFields) {
    if (!j.contains(name)) parse_error(std::string("missing parameter ") + name);
    p.*field = number(j[name], name);
  }
  return p;
}

Json to_json(const DistortionReport& r) {
  Json j{{"e_s", r.sampson}, {"e_v", r.vertical_disparity}};
  for (const auto& [suffix, side] :
       {std::pair<std::string, const SideDistortion*>{"", &r.mean},
        {"_left", &r.left},
        {"_right", &r.right}}) {
    const Json values = side_json(*side);
    for (const auto& item : values.items()) j[item.key() + suffix] = item.value();
  }
  return j;
}

Json to_json(const Weights& w) {
  return Json{{"rho_ar", w.aspect_ratio}, {"rho_sk", w.skewness},
              {"rho_r", w.rotation},      {"rho_sr", w.size_ratio}};
}

Json to_json(const RoundRecord& r, bool accepted) {
  return Json{{"round", r.round},
              {"accepted", accepted},
              {"params", to_json(r.params)},
              {"solve_weights", to_json(r.solve_weights)},
              {"weights", to_json(r.weights)},
              {"cost", r.cost},
              {"normalized_cost", r.normalized_cost},
              {"e_v", r.vertical_disparity},
              {"report", to_json(r.report)},
              {"inner_iterations", r.inner_iterations},
              {"inner_termination", std::string(to_string(r.inner_termination))}};
}

Json to_json(const SolveTrace& t) {
  Json rounds = Json::array();
  for (const auto& r : t.rounds) rounds.push_back(to_json(r));
  return Json{{"rounds", std::move(rounds)},
              {"rejected", t.rejected ? to_json(*t.rejected, false) : Json(nullptr)},
              {"termination", std::string(to_string(t.termination))},
              {"warnings", t.warnings}};
}

std::string trace_json_lines(const SolveTrace& t) {
  std::string out;
  for (const auto& r : t.rounds) out += to_json(r).dump() + "\n";
  if (t.rejected) out += to_json(*t.rejected, false).dump() + "\n";
  return out;
}

Json to_json(const GroundTruth& gt) {
  std::vector<int> mask(gt.inlier_mask.begin(), gt.inlier_mask.end());
  return Json{{"distortion", std::string(to_string(gt.distortion))},
              {"magnitude", gt.magnitude},
              {"F", to_json(gt.F)},
              {"H_l", to_json(gt.rectification.left)},
              {"H_r", to_json(gt.rectification.right)},
              {"left_camera", camera_json(gt.left)},
              {"right_camera", camera_json(gt.right)},
              {"inlier_mask", std::move(mask)}};
}

void apply_config(const Json& j, SolverConfig& solver, RansacConfig& ransac) {
  check_keys(j, {"solver", "ransac"}, "config");
  if (j.contains("solver")) {
    const Json& s = j["solver"];
    check_keys(s,
               {"mode", "max_outer_iters", "initial_radius", "max_inner_iters",
                "gradient_tolerance", "step_tolerance", "relative_fd_step",
                "thresholds"},
               "solver config");
    if (s.contains("mode")) {
      if (!s["mode"].is_string()) parse_error("mode must be a string");
      try {
        solver.mode = parse_solver_mode(s["mode"].get<std::string>());
      } catch (const Error& e) {
        parse_error(e.what());
      }
    }
    if (s.contains("max_outer_iters")) {
      solver.max_outer_iters = integer(s["max_outer_iters"], "max_outer_iters");
    }
    if (s.contains("initial_radius")) {
      solver.inner.initial_radius = number(s["initial_radius"], "initial_radius");
    }
    if (s.contains("max_inner_iters")) {
      solver.inner.max_iterations = integer(s["max_inner_iters"], "max_inner_iters");
    }
    if (s.contains("gradient_tolerance")) {
      solver.inner.gradient_tolerance =
          number(s["gradient_tolerance"], "gradient_tolerance");
    }
    if (s.contains("step_tolerance")) {
      solver.inner.step_tolerance = number(s["step_tolerance"], "step_tolerance");
    }
    if (s.contains("relative_fd_step")) {
      solver.inner.relative_fd_step = number(s["relative_fd_step"], "relative_fd_step");
    }
    if (s.contains("thresholds")) {
      const Json& t = s["thresholds"];
      check_keys(t, {"ar_min", "ar_max", "sk_max", "sr_min", "sr_max", "r_max"},
                 "thresholds");
      Thresholds& th = solver.thresholds;
      if (t.contains("ar_min")) th.ar_min = number(t["ar_min"], "ar_min");
      if (t.contains("ar_max")) th.ar_max = number(t["ar_max"], "ar_max");
      if (t.contains("sk_max")) th.sk_max = number(t["sk_max"], "sk_max");
      if (t.contains("sr_min")) th.sr_min = number(t["sr_min"], "sr_min");
      if (t.contains("sr_max")) th.sr_max = number(t["sr_max"], "sr_max");
      if (t.contains("r_max")) th.r_max = number(t["r_max"], "r_max");
    }
  }
  if (j.contains("ransac")) {
    const Json& r = j["ransac"];
    check_keys(r, {"max_iterations", "inlier_threshold", "confidence", "seed"},
               "ransac config");
    if (r.contains("max_iterations")) {
      ransac.max_iterations = integer(r["max_iterations"], "max_iterations");
    }
    if (r.contains("inlier_threshold")) {
      ransac.inlier_threshold = number(r["inlier_threshold"], "inlier_threshold");
    }
    if (r.contains("confidence")) ransac.confidence = number(r["confidence"], "confidence");
    if (r.contains("seed")) {
      if (!r["seed"].is_number_unsigned()) parse_error("seed must be a non-negative integer");
      ransac.seed = r["seed"].get<std::uint64_t>();
    }
  }
}

Json read_json_file(const std::filesystem::path& path) {
  std::ifstream f(path);
  if (!f) throw Error(ErrorCode::kIo, "cannot open " + path.string());
  std::stringstream buf;
  buf << f.rdbuf();
  try {
    return Json::parse(buf.str());
  } catch (const Json::parse_error& e) {
    parse_error(path.string() + ": " + e.what());
  }
}

void write_text_file(const std::filesystem::path& path, const std::string& text) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw Error(ErrorCode::kIo, "cannot write " + tmp.string());
    f << text;
    if (!f) throw Error(ErrorCode::kIo, "failed writing " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) {
    std::filesystem::remove(tmp, ec);
    throw Error(ErrorCode::kIo, "cannot move output into place: " + path.string());
  }
}

void write_json_file(const std::filesystem::path& path, const Json& j) {
  write_text_file(path, j.dump(2) + "\n");
}

}  // namespace stereorect

#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

#include "stereorect/matching.h"
#include "stereorect/metrics.h"
#include "stereorect/optimizer.h"
#include "stereorect/synthgen.h"

namespace stereorect {

using Json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "1.0.0";

//! Provenance recorded verbatim into every output document.
struct RunManifest {
  std::string command;
  std::vector<std::string> inputs;
  std::string config_path;
  std::string mode;
  std::uint64_t seed = 0;
  std::string output_dir;
  std::string tool_version = kToolVersion;
};

Json to_json(const RunManifest& m);

//! {"width": w, "height": h, "pairs": [[ul, vl, ur, vr], ...]}. An optional
//! "manifest" member is accepted and ignored on read.
Json to_json(const CorrespondenceSet& c);
//! Throws kParse on malformed documents and kInvalidArgument on invalid data.
CorrespondenceSet correspondences_from_json(const Json& j);

//! 3x3 nested row-major array.
Json to_json(const Mat3& m);
Mat3 mat3_from_json(const Json& j);

Json to_json(const RectParams& p);
RectParams rect_params_from_json(const Json& j);

//! Flat keys e_s, e_v, e_o, e_a, e_ar, e_sk, e_r, e_sr (means of both views)
//! plus their _left and _right variants.
Json to_json(const DistortionReport& r);
Json to_json(const Weights& w);
Json to_json(const RoundRecord& r, bool accepted = true);
Json to_json(const SolveTrace& t);
//! One compact JSON record per line: accepted rounds, then the rejected one.
std::string trace_json_lines(const SolveTrace& t);

Json to_json(const GroundTruth& gt);

//! Applies a config document of the form
//!   {"solver": {"mode", "max_outer_iters", "initial_radius",
//!               "max_inner_iters", "gradient_tolerance", "step_tolerance",
//!               "relative_fd_step", "thresholds": {...}},
//!    "ransac": {"max_iterations", "inlier_threshold", "confidence", "seed"}}
//! on top of the given values. Unknown keys are rejected with kParse.
void apply_config(const Json& j, SolverConfig& solver, RansacConfig& ransac);

//! Throws kIo when the file cannot be read and kParse on invalid JSON.
Json read_json_file(const std::filesystem::path& path);
//! Writes through a temporary file and renames, so readers never observe a
//! partial document. Throws kIo.
void write_text_file(const std::filesystem::path& path, const std::string& text);
void write_json_file(const std::filesystem::path& path, const Json& j);

}  // namespace stereorect

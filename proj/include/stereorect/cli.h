#pragma once

#include <ostream>
#include <string>
#include <vector>

namespace stereorect {

//! Process exit codes of the command-line tool.
enum ExitCode : int {
  kExitOk = 0,
  kExitUsage = 2,   // bad flags, config or input documents
  kExitData = 3,    // too few inliers or degenerate correspondences
  kExitSolver = 4,  // estimation failed
};

//! Runs the tool in-process. args excludes the program name.
//!
//!   synth   --out DIR [--dims WxH] [--seed S] [--points N] [--noise PX]
//!           [--outliers FRAC]
//!   rectify --matches FILE --out DIR [--mode usr|usr-cgd] [--seed S]
//!           [--left IMG --right IMG] [--scanlines K] [--autofit] ...
//!   eval    DIR [--seeds S] [--jobs J] [--mode usr|usr-cgd] [--csv FILE] ...
//!
//! The solver and RANSAC settings of rectify and eval come from --config, or
//! the STEREORECT_CONFIG environment variable, and are then overridden by
//! explicit flags.
int run_cli(const std::vector<std::string>& args, std::ostream& out,
            std::ostream& err);

}  // namespace stereorect

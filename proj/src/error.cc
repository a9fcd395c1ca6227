#include "stereorect/error.h"

namespace stereorect {

std::string_view to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::kDegenerateProjection: return "DegenerateProjection";
    case ErrorCode::kSingularHomography: return "SingularHomography";
    case ErrorCode::kRankDeficient: return "RankDeficient";
    case ErrorCode::kPointAtInfinity: return "PointAtInfinity";
    case ErrorCode::kZeroDenominator: return "ZeroDenominator";
    case ErrorCode::kZeroLength: return "ZeroLength";
    case ErrorCode::kDegenerateQuadrilateral: return "DegenerateQuadrilateral";
    case ErrorCode::kDegenerateConfiguration: return "DegenerateConfiguration";
    case ErrorCode::kInsufficientInliers: return "InsufficientInliers";
    case ErrorCode::kNonFiniteResidual: return "NonFiniteResidual";
    case ErrorCode::kTooFewVisiblePoints: return "TooFewVisiblePoints";
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIo: return "IoError";
    case ErrorCode::kParse: return "ParseError";
  }
  return "Unknown";
}

}  // namespace stereorect

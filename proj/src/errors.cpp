#include "cssep/errors.hpp"

namespace cssep {

const char* to_string(ErrorCode code) {
  switch (code) {
    case ErrorCode::DimensionMismatch: return "DimensionMismatch";
    case ErrorCode::NotCompletelySymmetric: return "NotCompletelySymmetric";
    case ErrorCode::ZeroVectorAtom: return "ZeroVectorAtom";
    case ErrorCode::UnknownExampleId: return "UnknownExampleId";
    case ErrorCode::DenseCapExceeded: return "DenseCapExceeded";
    case ErrorCode::MalformedFile: return "MalformedFile";
    case ErrorCode::UnsupportedVersion: return "UnsupportedVersion";
    case ErrorCode::SingularKKTSystem: return "SingularKKTSystem";
    case ErrorCode::DegenerateDirection: return "DegenerateDirection";
    case ErrorCode::GramIllConditioned: return "GramIllConditioned";
    case ErrorCode::InnerSolverFailed: return "InnerSolverFailed";
    case ErrorCode::UnsupportedDimension: return "UnsupportedDimension";
  }
  return "Unknown";
}

}  // namespace cssep

#include "dualdyn/error.h"

namespace dualdyn {

const char* ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidInput:
      return "invalid input";
    case ErrorCode::kInvalidDomain:
      return "invalid domain";
    case ErrorCode::kInvalidParameter:
      return "invalid parameter";
    case ErrorCode::kInvalidGame:
      return "invalid game";
    case ErrorCode::kDomainError:
      return "domain error";
    case ErrorCode::kPrecondition:
      return "precondition error";
    case ErrorCode::kSolverFailure:
      return "solver error";
    case ErrorCode::kDivergence:
      return "divergence";
    case ErrorCode::kConfig:
      return "config error";
  }
  return "error";
}

}  // namespace dualdyn

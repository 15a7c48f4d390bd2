#ifndef DUALDYN_ERROR_H_
#define DUALDYN_ERROR_H_

#include <stdexcept>
#include <string>

namespace dualdyn {

enum class ErrorCode {
  kInvalidInput,      // non-finite or malformed numeric input
  kInvalidDomain,     // a domain descriptor is inconsistent (lo > hi, dim 0)
  kInvalidParameter,  // a scalar parameter is out of range
  kInvalidGame,       // a game description violates its structural contract
  kDomainError,       // a point lies outside the domain of an operation
  kPrecondition,      // a rate-bound precondition does not hold
  kSolverFailure,     // an iterative solver did not converge
  kDivergence,        // an integration left the divergence threshold
  kConfig,            // experiment configuration problem
};

const char* ErrorCodeName(ErrorCode code);

// All library failures are reported through this exception type.
class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& message)
      : std::runtime_error(std::string(ErrorCodeName(code)) + ": " + message),
        code_(code) {}

  ErrorCode code() const { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] inline void Fail(ErrorCode code, const std::string& message) {
  throw Error(code, message);
}

}  // namespace dualdyn

#endif  // DUALDYN_ERROR_H_

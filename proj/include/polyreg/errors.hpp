#pragma once

#include <stdexcept>
#include <string>

namespace polyreg {

struct Error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct ParityError : Error { using Error::Error; };
struct RangeError : Error { using Error::Error; };
struct DivergentConvolution : Error { using Error::Error; };
struct InexactDivision : Error { using Error::Error; };
struct SingularJumpSystem : Error { using Error::Error; };
struct PairCountMismatch : Error { using Error::Error; };
struct DecayContractViolation : Error { using Error::Error; };
struct QuadratureFailure : Error { using Error::Error; };
struct IllConditioned : Error { using Error::Error; };
struct InsufficientDecades : Error { using Error::Error; };

struct ConfigError : Error {
  ConfigError(const std::string& what, int line = 0, std::string field = {})
      : Error(line > 0 ? "line " + std::to_string(line) + ": " + what : what),
        line(line), field(std::move(field)) {}
  int line;
  std::string field;
};

}  // namespace polyreg

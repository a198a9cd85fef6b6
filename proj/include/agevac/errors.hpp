#pragma once

#include <stdexcept>
#include <string>

namespace agevac {

enum class errc {
  non_positive_rate,
  non_finite_rate,
  unstable,
  near_degenerate_roots,
  truncation_insufficient,
  singular_system,
  not_lumpable,
  invalid_config,
  numerical_failure,
};

inline const char* errc_name(errc c) {
  switch (c) {
    case errc::non_positive_rate:       return "NonPositiveRate";
    case errc::non_finite_rate:         return "NonFiniteRate";
    case errc::unstable:                return "Unstable";
    case errc::near_degenerate_roots:   return "NearDegenerateRoots";
    case errc::truncation_insufficient: return "TruncationInsufficient";
    case errc::singular_system:         return "SingularSystem";
    case errc::not_lumpable:            return "NotLumpable";
    case errc::invalid_config:          return "InvalidConfig";
    case errc::numerical_failure:       return "NumericalFailure";
  }
  return "UnknownError";
}

class Error : public std::runtime_error {
 public:
  Error(errc code, const std::string& what)
      : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}

  errc code() const noexcept { return code_; }

 private:
  errc code_;
};

[[noreturn]] inline void raise(errc code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace agevac

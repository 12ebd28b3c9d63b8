#pragma once

#include <stdexcept>
#include <string>

namespace entbench {

enum class ErrorKind {
  invalid_dimension,
  dimension_mismatch,
  invalid_argument,
  invalid_state,
  invalid_povm,
  invalid_permutation,
  unsupported,
};

const char* to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}
  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

inline const char* to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_dimension: return "invalid dimension";
    case ErrorKind::dimension_mismatch: return "dimension mismatch";
    case ErrorKind::invalid_argument: return "invalid argument";
    case ErrorKind::invalid_state: return "invalid state";
    case ErrorKind::invalid_povm: return "invalid povm";
    case ErrorKind::invalid_permutation: return "invalid permutation";
    case ErrorKind::unsupported: return "unsupported";
  }
  return "error";
}

inline void require(bool cond, ErrorKind kind, const std::string& what) {
  if (!cond) throw Error(kind, what);
}

}  // namespace entbench

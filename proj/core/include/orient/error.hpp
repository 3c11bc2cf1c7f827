#pragma once

#include <stdexcept>
#include <string>

namespace orient {

enum class ErrorCode {
  empty_input,
  duplicate_label,
  ragged_matrix,
  non_finite_value,
  dimension_mismatch,
  zero_vector,
  size_mismatch,
  bad_argument,
  k_too_large,
  degenerate_spectrum,
  no_resolvable_edges,
  already_active,
  no_active_entities,
  unknown_node,
  no_scorable_pairs,
  no_scorable_edges,
  reserved_label,
  malformed_input,
  io_error,
};

const char* to_string(ErrorCode code);

class Error : public std::runtime_error {
public:
  Error(ErrorCode code, const std::string& what)
      : std::runtime_error(what), code_(code) {}

  ErrorCode code() const noexcept { return code_; }

private:
  ErrorCode code_;
};

[[noreturn]] inline void raise(ErrorCode code, const std::string& what) {
  throw Error(code, what);
}

}  // namespace orient

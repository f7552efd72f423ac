#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace rpteng {

enum class ErrorKind {
  invalid_domain,
  length_mismatch,
  parameter_mismatch,
  invalid_argument,
  invalid_config,
  reference_diverged,
  implicit_tableau,
  linear_invariant,
  relaxation_out_of_range,
  degenerate_gradient,
  singular_gram,
  projection_not_converged,
  no_progress,
  fit_failed,
  zero_denominator,
  misaligned_times,
  io,
};

std::string_view to_string(ErrorKind kind);

class Error : public std::runtime_error {
 public:
  Error(ErrorKind kind, const std::string& what)
      : std::runtime_error(std::string(to_string(kind)) + ": " + what), kind_(kind) {}

  ErrorKind kind() const noexcept { return kind_; }

 private:
  ErrorKind kind_;
};

}  // namespace rpteng

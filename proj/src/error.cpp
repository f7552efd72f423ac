#include "rpteng/error.hpp"

namespace rpteng {

std::string_view to_string(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::invalid_domain: return "invalid-domain";
    case ErrorKind::length_mismatch: return "length-mismatch";
    case ErrorKind::parameter_mismatch: return "parameter-mismatch";
    case ErrorKind::invalid_argument: return "invalid-argument";
    case ErrorKind::invalid_config: return "invalid-config";
    case ErrorKind::reference_diverged: return "reference-diverged";
    case ErrorKind::implicit_tableau: return "implicit-tableau";
    case ErrorKind::linear_invariant: return "linear-invariant";
    case ErrorKind::relaxation_out_of_range: return "relaxation-out-of-range";
    case ErrorKind::degenerate_gradient: return "degenerate-gradient";
    case ErrorKind::singular_gram: return "singular-gram";
    case ErrorKind::projection_not_converged: return "projection-not-converged";
    case ErrorKind::no_progress: return "no-progress";
    case ErrorKind::fit_failed: return "fit-failed";
    case ErrorKind::zero_denominator: return "zero-denominator";
    case ErrorKind::misaligned_times: return "misaligned-times";
    case ErrorKind::io: return "io";
  }
  return "unknown";
}

}  // namespace rpteng

#pragma once

#include <stdexcept>
#include <string>
#include <string_view>

namespace boxcalc {

enum class Errc {
  out_of_domain,
  non_uniform_shift,
  fit_degenerate,
  insufficient_resolution,
  parameter_out_of_range,
  grid_mismatch,
  boundary_not_zero,
  arity_mismatch,
  variation_class_violation,
  nondegeneracy_failure,
  constraint_violated,
  singular_system,
  boundary_incomplete,
  config_invalid,
  holder_mismatch,
  partials_mismatch,
  not_affine,
};

inline std::string_view to_string(Errc code) {
  switch (code) {
    case Errc::out_of_domain: return "OutOfDomain";
    case Errc::non_uniform_shift: return "NonUniformShift";
    case Errc::fit_degenerate: return "FitDegenerate";
    case Errc::insufficient_resolution: return "InsufficientResolution";
    case Errc::parameter_out_of_range: return "ParameterOutOfRange";
    case Errc::grid_mismatch: return "GridMismatch";
    case Errc::boundary_not_zero: return "BoundaryNotZero";
    case Errc::arity_mismatch: return "ArityMismatch";
    case Errc::variation_class_violation: return "VariationClassViolation";
    case Errc::nondegeneracy_failure: return "NondegeneracyFailure";
    case Errc::constraint_violated: return "ConstraintViolated";
    case Errc::singular_system: return "SingularSystem";
    case Errc::boundary_incomplete: return "BoundaryIncomplete";
    case Errc::config_invalid: return "ConfigInvalid";
    case Errc::holder_mismatch: return "HolderMismatch";
    case Errc::partials_mismatch: return "PartialsMismatch";
    case Errc::not_affine: return "NotAffine";
  }
  return "Unknown";
}

/// Exception carrying a machine-readable error code.
class Error : public std::runtime_error {
 public:
  Error(Errc code, const std::string& what)
      : std::runtime_error(std::string(to_string(code)) + ": " + what), code_(code) {}

  Errc code() const noexcept { return code_; }

 private:
  Errc code_;
};

}  // namespace boxcalc

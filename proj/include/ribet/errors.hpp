#pragma once

#include <stdexcept>
#include <string>

namespace ribet {

/// Base of every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define RIBET_DEFINE_ERROR(Name)                                   \
  class Name : public Error {                                      \
   public:                                                         \
    explicit Name(const std::string& what) : Error(#Name ": " + what) {} \
  }

// finite_field
RIBET_DEFINE_ERROR(InvalidField);
RIBET_DEFINE_ERROR(FieldTooLarge);
RIBET_DEFINE_ERROR(FieldMismatch);
RIBET_DEFINE_ERROR(DivisionByZero);
RIBET_DEFINE_ERROR(ZeroElement);

// elliptic_curve
RIBET_DEFINE_ERROR(InvalidCurve);
RIBET_DEFINE_ERROR(PointNotOnCurve);
RIBET_DEFINE_ERROR(FullTorsionNotRational);
RIBET_DEFINE_ERROR(CharacteristicDividesN);

// cm_endomorphism
RIBET_DEFINE_ERROR(InvalidCM);
RIBET_DEFINE_ERROR(ZeroEndomorphism);
RIBET_DEFINE_ERROR(PreimageNotRational);

// divisor / function_eval
RIBET_DEFINE_ERROR(CurveMismatch);
RIBET_DEFINE_ERROR(NotPrincipal);
RIBET_DEFINE_ERROR(SupportCollision);
RIBET_DEFINE_ERROR(SupportsNotDisjoint);
RIBET_DEFINE_ERROR(NotTorsion);

// gen_jacobian / ribet
RIBET_DEFINE_ERROR(InvalidFiber);
RIBET_DEFINE_ERROR(NotInKernel);
RIBET_DEFINE_ERROR(InvalidEndomorphism);
RIBET_DEFINE_ERROR(QInBadLocus);
RIBET_DEFINE_ERROR(PathDisagreement);
RIBET_DEFINE_ERROR(NoWitnessFound);

// harness
RIBET_DEFINE_ERROR(ConfigError);
RIBET_DEFINE_ERROR(DeskScaleExceeded);

#undef RIBET_DEFINE_ERROR

}  // namespace ribet

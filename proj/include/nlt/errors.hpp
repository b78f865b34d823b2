#pragma once

#include <stdexcept>
#include <string>

namespace nlt {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define NLT_DEFINE_ERROR(Name)                \
  class Name : public Error {                 \
   public:                                    \
    using Error::Error;                       \
  }

NLT_DEFINE_ERROR(InvalidKernel);
NLT_DEFINE_ERROR(ResolutionError);
NLT_DEFINE_ERROR(TruncationError);
NLT_DEFINE_ERROR(GridError);
NLT_DEFINE_ERROR(DomainError);
NLT_DEFINE_ERROR(StabilityError);
NLT_DEFINE_ERROR(NumericalBlowup);
NLT_DEFINE_ERROR(BoundsViolation);
NLT_DEFINE_ERROR(UnsupportedModel);
NLT_DEFINE_ERROR(PathOrderError);
NLT_DEFINE_ERROR(SupportError);
NLT_DEFINE_ERROR(FitError);
NLT_DEFINE_ERROR(ScaleError);
NLT_DEFINE_ERROR(SnapshotError);
NLT_DEFINE_ERROR(ConfigError);

#undef NLT_DEFINE_ERROR

}  // namespace nlt

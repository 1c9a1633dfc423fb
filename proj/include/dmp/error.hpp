#pragma once

#include <stdexcept>
#include <string>

namespace dmp {

// Base for every error raised by the library. Each failure mode named in the
// public contracts has its own subclass so callers can catch selectively.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

#define DMP_DEFINE_ERROR(Name)                  \
  class Name : public Error {                   \
   public:                                      \
    explicit Name(const std::string& what)      \
        : Error(std::string(#Name ": ") + what) {} \
  }

DMP_DEFINE_ERROR(DegenerateSixD);
DMP_DEFINE_ERROR(NonPositiveScale);
DMP_DEFINE_ERROR(BehindCamera);
DMP_DEFINE_ERROR(ShapeMismatch);
DMP_DEFINE_ERROR(DegenerateFrame);
DMP_DEFINE_ERROR(TooShort);
DMP_DEFINE_ERROR(GraphConsumed);
DMP_DEFINE_ERROR(NonFiniteLoss);
DMP_DEFINE_ERROR(ConfigError);
DMP_DEFINE_ERROR(FormatError);

#undef DMP_DEFINE_ERROR

}  // namespace dmp

#pragma once

#include <stdexcept>
#include <string>

namespace carlab {

/// Base class for all errors thrown by the library.
class Error : public std::runtime_error {
 public:
  explicit Error(const std::string& what) : std::runtime_error(what) {}
};

#define CARLAB_DEFINE_ERROR(Name)                             \
  class Name : public Error {                                 \
   public:                                                    \
    explicit Name(const std::string& what) : Error(what) {}   \
  };

// geometry
CARLAB_DEFINE_ERROR(CornerPoint)
CARLAB_DEFINE_ERROR(ResolutionTooCoarse)
CARLAB_DEFINE_ERROR(OutOfDomain)

// velocity
CARLAB_DEFINE_ERROR(DegenerateField)
CARLAB_DEFINE_ERROR(OutOfHorizon)
CARLAB_DEFINE_ERROR(NotC1)

// partition
CARLAB_DEFINE_ERROR(ApertureOutOfRange)
CARLAB_DEFINE_ERROR(PartitionFailure)

// weight
CARLAB_DEFINE_ERROR(InvalidPartition)
CARLAB_DEFINE_ERROR(SlackNonpositive)

// transport
CARLAB_DEFINE_ERROR(RhoOutOfRange)

// verify
CARLAB_DEFINE_ERROR(GridMismatch)
CARLAB_DEFINE_ERROR(WindowOutOfRange)

// config / cli
CARLAB_DEFINE_ERROR(ParseError)
CARLAB_DEFINE_ERROR(ValidationError)

#undef CARLAB_DEFINE_ERROR

}  // namespace carlab

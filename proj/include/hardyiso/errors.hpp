#pragma once

#include <stdexcept>
#include <string>

namespace hardyiso {

/// Base class for every error raised by the library.
class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
  virtual const char* kind() const noexcept { return "Error"; }
};

#define HARDYISO_DEFINE_ERROR(Name)                                  \
  class Name : public Error {                                        \
   public:                                                           \
    using Error::Error;                                              \
    const char* kind() const noexcept override { return #Name; }     \
  };

// Argument outside the closed disc, |a| too close to 1, bad tolerance, ...
HARDYISO_DEFINE_ERROR(DomainError)
HARDYISO_DEFINE_ERROR(AmbiguousClassification)
HARDYISO_DEFINE_ERROR(IdentityError)
HARDYISO_DEFINE_ERROR(GeneratorExhausted)
HARDYISO_DEFINE_ERROR(BranchError)
HARDYISO_DEFINE_ERROR(GridMismatch)
HARDYISO_DEFINE_ERROR(DegreeError)
HARDYISO_DEFINE_ERROR(ZeroCodimension)
HARDYISO_DEFINE_ERROR(WrongClass)
HARDYISO_DEFINE_ERROR(NotCertified)
HARDYISO_DEFINE_ERROR(InvalidInput)
// Malformed JSON or a document that does not match the expected shape.
HARDYISO_DEFINE_ERROR(ParseError)

#undef HARDYISO_DEFINE_ERROR

}  // namespace hardyiso

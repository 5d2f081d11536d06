#pragma once

#include <stdexcept>
#include <string>

namespace ehrlab {

// Base of every library error. kind() is the stable machine-readable name
// used in CLI and HTTP error payloads.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& message)
      : std::runtime_error(message), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define EHRLAB_DEFINE_ERROR(Name)                                 \
  class Name : public Error {                                     \
   public:                                                        \
    explicit Name(const std::string& message) : Error(#Name, message) {} \
  };

EHRLAB_DEFINE_ERROR(InvalidGraph)
EHRLAB_DEFINE_ERROR(ParseError)
EHRLAB_DEFINE_ERROR(InvalidArgument)
EHRLAB_DEFINE_ERROR(NotUnicyclic)
EHRLAB_DEFINE_ERROR(NotTreelike)
EHRLAB_DEFINE_ERROR(EnumerationTooLarge)
EHRLAB_DEFINE_ERROR(PictureTooLarge)
EHRLAB_DEFINE_ERROR(BudgetExceeded)
EHRLAB_DEFINE_ERROR(NotWinnable)
EHRLAB_DEFINE_ERROR(StrategyExhausted)
EHRLAB_DEFINE_ERROR(ResourceExhausted)
EHRLAB_DEFINE_ERROR(ContractViolation)
EHRLAB_DEFINE_ERROR(InconsistentSpec)

#undef EHRLAB_DEFINE_ERROR

}  // namespace ehrlab

#pragma once

#include <stdexcept>
#include <string>

namespace bismut_lab {

/** \brief Base class of every error raised by the library. */
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(kind + ": " + what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define BISMUT_LAB_ERROR(Name)                                      \
  class Name : public Error {                                       \
   public:                                                          \
    explicit Name(const std::string& what) : Error(#Name, what) {}  \
  };

BISMUT_LAB_ERROR(SingularMetric)
BISMUT_LAB_ERROR(NotPluriclosed)
BISMUT_LAB_ERROR(NonPositiveMetric)
BISMUT_LAB_ERROR(InvalidLieData)
BISMUT_LAB_ERROR(DimensionMismatch)
BISMUT_LAB_ERROR(NotFound)
BISMUT_LAB_ERROR(InsufficientData)
BISMUT_LAB_ERROR(AnsatzLeak)
BISMUT_LAB_ERROR(StepRejected)
BISMUT_LAB_ERROR(ConfigError)

#undef BISMUT_LAB_ERROR

}  // namespace bismut_lab

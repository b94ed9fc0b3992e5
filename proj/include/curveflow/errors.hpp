#pragma once

#include <stdexcept>
#include <string>

namespace curveflow {

// Every failure carries a stable class name so callers (and the CLI) can
// report it in machine-readable form.
class Error : public std::runtime_error {
 public:
  Error(std::string kind, const std::string& what)
      : std::runtime_error(what), kind_(std::move(kind)) {}
  const std::string& kind() const noexcept { return kind_; }

 private:
  std::string kind_;
};

#define CURVEFLOW_DEFINE_ERROR(Name)                                      \
  class Name : public Error {                                             \
   public:                                                                \
    explicit Name(const std::string& what) : Error(#Name, what) {}        \
  };

CURVEFLOW_DEFINE_ERROR(ZeroEdge)
CURVEFLOW_DEFINE_ERROR(DegenerateCurve)
CURVEFLOW_DEFINE_ERROR(OrientationError)
CURVEFLOW_DEFINE_ERROR(InvalidSpec)
CURVEFLOW_DEFINE_ERROR(NonpositiveDelta)
CURVEFLOW_DEFINE_ERROR(WeightNotPositive)
CURVEFLOW_DEFINE_ERROR(EpsilonOutOfRange)
CURVEFLOW_DEFINE_ERROR(SingularSystem)
CURVEFLOW_DEFINE_ERROR(MeshCollapse)
CURVEFLOW_DEFINE_ERROR(MaxStepsExceeded)
CURVEFLOW_DEFINE_ERROR(ParseError)
CURVEFLOW_DEFINE_ERROR(ValidationError)
CURVEFLOW_DEFINE_ERROR(IoError)

#undef CURVEFLOW_DEFINE_ERROR

// A step failure tagged with the time level it happened at. The original
// error class is kept in cause_kind().
class StepRejected : public Error {
 public:
  StepRejected(long level, const Error& cause)
      : Error("StepRejected", "step rejected at time level " + std::to_string(level) +
                                  ": " + cause.kind() + ": " + cause.what()),
        level_(level),
        cause_kind_(cause.kind()) {}
  long level() const noexcept { return level_; }
  const std::string& cause_kind() const noexcept { return cause_kind_; }

 private:
  long level_;
  std::string cause_kind_;
};

}  // namespace curveflow

#pragma once

#include <stdexcept>
#include <string>

namespace goalinf {

// Exit-code families used by the command-line tool.
enum class ErrorFamily : int {
  kUsage = 1,
  kSchema = 2,
  kPlanning = 3,
  kTransport = 4,
  kInternal = 5,
};

class Error : public std::runtime_error {
 public:
  Error(ErrorFamily family, std::string kind, const std::string& message)
      : std::runtime_error(kind + ": " + message),
        family_(family),
        kind_(std::move(kind)) {}

  ErrorFamily family() const noexcept { return family_; }
  const std::string& kind() const noexcept { return kind_; }

 private:
  ErrorFamily family_;
  std::string kind_;
};

#define GOALINF_DEFINE_ERROR(Name, Family)                  \
  class Name : public Error {                               \
   public:                                                  \
    explicit Name(const std::string& message)               \
        : Error(ErrorFamily::Family, #Name, message) {}     \
  };

// pddl
GOALINF_DEFINE_ERROR(SemanticError, kSchema)
GOALINF_DEFINE_ERROR(UnboundVariable, kSchema)
GOALINF_DEFINE_ERROR(UnknownFluent, kSchema)
GOALINF_DEFINE_ERROR(IllegalEffect, kSchema)

// worldgen
GOALINF_DEFINE_ERROR(SchemaError, kSchema)
GOALINF_DEFINE_ERROR(ConsistencyError, kSchema)
GOALINF_DEFINE_ERROR(SamplingExhausted, kPlanning)
GOALINF_DEFINE_ERROR(CompileError, kSchema)

// planner / infer
GOALINF_DEFINE_ERROR(InapplicableAction, kPlanning)
GOALINF_DEFINE_ERROR(AllGoalsUnreachable, kPlanning)
GOALINF_DEFINE_ERROR(GoalUnreachableFromState, kPlanning)
GOALINF_DEFINE_ERROR(InapplicableSequence, kPlanning)
GOALINF_DEFINE_ERROR(HorizonExceeded, kPlanning)
GOALINF_DEFINE_ERROR(ZeroEvidence, kPlanning)
GOALINF_DEFINE_ERROR(StateSpaceTooLarge, kPlanning)
GOALINF_DEFINE_ERROR(InvalidConfig, kUsage)

// translate
GOALINF_DEFINE_ERROR(InvalidRequest, kUsage)
GOALINF_DEFINE_ERROR(TransportError, kTransport)
GOALINF_DEFINE_ERROR(AuthError, kTransport)
GOALINF_DEFINE_ERROR(RateLimited, kTransport)
GOALINF_DEFINE_ERROR(FixtureMissing, kSchema)

// eval
GOALINF_DEFINE_ERROR(RangeError, kSchema)
GOALINF_DEFINE_ERROR(InsufficientPairs, kSchema)
GOALINF_DEFINE_ERROR(SampleBudgetExhausted, kTransport)

#undef GOALINF_DEFINE_ERROR

// Parse failure with the position of the first offending token (1-based).
class SyntaxError : public Error {
 public:
  SyntaxError(const std::string& message, int line, int column)
      : Error(ErrorFamily::kSchema, "SyntaxError",
              message + " at line " + std::to_string(line) + ", column " +
                  std::to_string(column)),
        line_(line),
        column_(column) {}

  int line() const noexcept { return line_; }
  int column() const noexcept { return column_; }

 private:
  int line_;
  int column_;
};

}  // namespace goalinf

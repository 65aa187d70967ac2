#pragma once

#include <string>
#include <vector>

#include "dcsharp/syntax.hpp"

namespace dcsharp {

struct Diagnostic {
  std::size_t clause_index = 0;
  std::string rule;
  std::string message;
};

// Rule identifiers carried by diagnostics.
namespace rules {
inline constexpr const char* kValueVariableInRvTerm = "value variable in RV term";
inline constexpr const char* kUnsafeNegation = "unsafe negation";
inline constexpr const char* kUnboundDistributionVariable = "unbound distribution variable";
inline constexpr const char* kInfiniteHerbrandBase = "infinite Herbrand base";
inline constexpr const char* kHeadNotRangeRestricted = "head variable not bound by body";
inline constexpr const char* kComparisonOperand = "comparison operand";
inline constexpr const char* kUnboundComparison = "comparison on unbound variable";
inline constexpr const char* kNegatedAggregateResult = "negated aggregate result reused";
inline constexpr const char* kInvalidDistribution = "invalid distribution";
inline constexpr const char* kRvTerm = "invalid RV term";
inline constexpr const char* kStatModelOperand = "statistical atom operand";
inline constexpr const char* kNoRvs = "program defines no RVs";
inline constexpr const char* kUnstratified = "unstratified negation";
inline constexpr const char* kCycle = "cyclic dependency";
}  // namespace rules

std::vector<Diagnostic> validate(const Program& p);
std::string to_string(const Diagnostic& d);

}  // namespace dcsharp

#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "dcsharp/analysis.hpp"

namespace dcsharp {

inline constexpr RvId kNoRv = std::numeric_limits<RvId>::max();

// A constant, or a runtime slot holding a value variable.
struct Operand {
  Term constant;
  std::int32_t slot = -1;
};

struct GroundLiteral {
  enum class Kind : std::uint8_t { Value, Compare, Linear };
  Kind kind = Kind::Value;
  bool positive = true;
  // Value: kNoRv when the term is not an RV of the program.
  RvId rv = kNoRv;
  Operand value;
  // Compare
  Operand lhs, rhs;
  CompareOp op = CompareOp::Eq;
  // Linear
  std::vector<Operand> inputs;
  std::vector<double> params;
  Operand output;
};

struct GroundBody {
  std::vector<GroundLiteral> literals;
  std::uint32_t slots = 0;
};

struct GroundClause {
  RvId head = kNoRv;
  std::uint32_t source = 0;
  GroundBody body;
  // Set when the distribution does not depend on value variables.
  std::optional<Distribution> fixed;
  DistributionExpr dist;
};

// Every ground instance of an aggregate-free program, with RV ids resolved.
class GroundModel {
 public:
  explicit GroundModel(std::shared_ptr<const Model> model);

  const Model& model() const { return *model_; }
  const std::shared_ptr<const Model>& model_ptr() const { return model_; }
  const std::vector<GroundClause>& clauses() const { return clauses_; }
  // Clause indices for an RV, in program order.
  const std::vector<std::uint32_t>& clauses_for(RvId id) const { return by_head_[id]; }

  // Groundings of a compiled body (a query), one per binding of its RV terms.
  std::vector<GroundBody> ground_body(const std::vector<BodyLiteral>& body, std::size_t slots) const;

  // An RV with two clauses that no value test keeps apart, if any.
  std::optional<RvId> overlapping_clauses() const;

  std::string to_string(const GroundClause& c) const;

 private:
  std::shared_ptr<const Model> model_;
  std::vector<GroundClause> clauses_;
  std::vector<std::vector<std::uint32_t>> by_head_;
};

// Evaluates a ground body left to right. value(rv) returns the RV's value
// (possibly undefined); it is called only for literals reached.
template <class ValueFn>
bool eval_ground_body(const GroundBody& b, Env& env, ValueFn&& value);

}  // namespace dcsharp

#include "dcsharp/ground_inl.hpp"

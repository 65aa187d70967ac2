#pragma once

#include <optional>
#include <span>
#include <vector>

#include "dcsharp/analysis.hpp"
#include "dcsharp/simulation.hpp"

namespace dcsharp {

enum class Truth : std::uint8_t { False, True, Unknown };

// Value of an RV in a (partial) world: nullptr when not known yet.
using ValueLookup = FunctionRef<const Term*(RvId)>;

// Aggregation over a nonempty multiset; nullopt for an empty one.
std::optional<Term> eval_aggregate(AggregateKind kind, std::span<const Term> values);

// Comparison atom on bound operands.
bool compare_values(CompareOp op, const Term& a, const Term& b);

// linear([X..],[w..,b],M) given bound inputs.
double eval_linear(const StatModel& m, const Env& env);

// Enumerates the groundings of a compiled body under env, calling cb with
// True for instances whose literals all hold and Unknown for instances where
// no literal is false but some depend on unknown values. False instances are
// pruned. env is restored on return.
void evaluate_body(const Model& model, const std::vector<BodyLiteral>& body, Env& env,
                   ValueLookup look, FunctionRef<void(Truth, const Env&)> cb);

// True when some grounding of body holds; stops at the first one. look must
// never return nullptr.
bool prove_body(const Model& model, const std::vector<BodyLiteral>& body, Env& env,
                ValueLookup look);

struct DstResult {
  std::vector<Distribution> dst;
  // Some clause instance for the RV could not be decided.
  bool unknown = false;
};

// Distributions of the clause instances for id whose bodies are true.
DstResult collect_dst(const Model& model, RvId id, ValueLookup look);

}  // namespace dcsharp

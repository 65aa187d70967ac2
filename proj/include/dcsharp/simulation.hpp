#pragma once

#include <cstdint>
#include <memory>
#include <type_traits>
#include <utility>
#include <vector>

#include "dcsharp/analysis.hpp"
#include "dcsharp/bayes_ball.hpp"
#include "dcsharp/distribution.hpp"
#include "dcsharp/parser.hpp"

namespace dcsharp {

// Non-owning callable reference for recursive continuations.
template <class Sig>
class FunctionRef;

template <class R, class... A>
class FunctionRef<R(A...)> {
 public:
  template <class F>
    requires(!std::is_same_v<std::remove_cvref_t<F>, FunctionRef> && std::is_invocable_r_v<R, F&, A...>)
  FunctionRef(F&& f)  // NOLINT(google-explicit-constructor)
      : obj_(const_cast<void*>(static_cast<const void*>(std::addressof(f)))),
        call_([](void* o, A... a) -> R {
          return (*static_cast<std::remove_reference_t<F>*>(o))(std::forward<A>(a)...);
        }) {}
  R operator()(A... a) const { return call_(obj_, std::forward<A>(a)...); }

 private:
  void* obj_;
  R (*call_)(void*, A...);
};

// Observed values indexed by RV id.
class EvidenceMap {
 public:
  EvidenceMap() = default;
  // Throws when an observation is not an RV of the DAG or contradicts another.
  EvidenceMap(const GroundDependencyDag& dag, const Evidence& ev);
  const Term* find(RvId id) const { return values_[id] ? &values_[id] : nullptr; }
  bool observed(RvId id) const { return static_cast<bool>(values_[id]); }
  const std::vector<RvId>& ids() const { return ids_; }
  const std::vector<std::uint8_t>& mask() const { return mask_; }

 private:
  std::vector<Term> values_;
  std::vector<std::uint8_t> mask_;
  std::vector<RvId> ids_;
};

// A query body compiled to slots.
struct CompiledQuery {
  std::vector<BodyLiteral> body;
  std::size_t slots = 0;
  std::vector<Term> names;
};

CompiledQuery compile_query(const std::vector<BodyLiteral>& query);

// RVs that a query body can read, including aggregate goals.
std::vector<RvId> query_rvs(const Model& model, const CompiledQuery& q);

// Everything fixed once per (program, query, evidence).
struct QueryContext {
  std::shared_ptr<const Model> model;
  CompiledQuery query;
  EvidenceMap evidence;
  RequisiteClassification classification;
  // Diagnostic universe E* and the column of each RV in it (or -1).
  std::vector<RvId> columns;
  std::vector<std::int32_t> column_of;
};

QueryContext make_query_context(std::shared_ptr<const Model> model,
                                const std::vector<BodyLiteral>& query, const Evidence& ev);

// Natural and filled log-weights are keyed by column in E*.
struct WeightedRow {
  bool f = false;
  std::vector<std::pair<std::uint32_t, double>> natural;
  std::vector<std::pair<std::uint32_t, double>> filled;
};

// Per-simulation tables. Reset between rows; buffers are reused.
struct SimulationState {
  explicit SimulationState(std::size_t n_rvs = 0);
  void reset(Rng r);

  Rng rng;
  std::vector<Term> asg;
  std::vector<std::uint8_t> top, bottom, queued, busy, dirty;
  std::vector<RvId> forward;
  std::size_t forward_head = 0;
  std::vector<std::vector<Distribution>> dst;
  // Weighed evidence in order, with log-weight.
  std::vector<std::pair<RvId, double>> weights;
  // Assigned RVs in assignment order, with the step they were assigned at.
  std::vector<RvId> assigned;
  std::vector<std::uint64_t> stamp;
  std::uint64_t clock = 0;
  // RVs touched this row, for cheap reset.
  std::vector<RvId> touched;

  // Must precede any write to the per-RV tables.
  void touch(RvId id);
  void assign(RvId id, Term v);
  // Appends to Forward unless already Bottom or queued.
  void schedule(RvId id);
  bool pop_forward(RvId& out);
};

struct SamplerOptions {
  bool strict = false;
  // Check per-firing invariants and throw on violation.
  bool audit = false;
};

class RowSampler {
 public:
  virtual ~RowSampler() = default;
  virtual const QueryContext& context() const = 0;
  // One full row: simulation followed by residual fill-ins.
  virtual WeightedRow sample(SimulationState& st) const = 0;
  std::size_t rv_count() const { return context().model->dag().size(); }
};

// Converts the weights recorded in st into a row over the context's columns.
WeightedRow row_from_state(const QueryContext& ctx, bool f, const SimulationState& st);

// Columns of E* that a row did not weigh naturally, as RV ids.
std::vector<RvId> residual_columns(const QueryContext& ctx, const WeightedRow& row);

}  // namespace dcsharp

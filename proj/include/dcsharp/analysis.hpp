#pragma once

#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "dcsharp/distribution.hpp"
#include "dcsharp/syntax.hpp"
#include "dcsharp/validate.hpp"

namespace dcsharp {

using RvId = std::uint32_t;

struct DefiniteClause {
  Term head;
  std::vector<Term> body;
};

struct DefiniteProgram {
  std::vector<DefiniteClause> clauses;
};

std::string to_string(const DefiniteClause& c);
std::string to_string(const DefiniteProgram& p);

// rv(A0) <- rv(T1),...,rv(Tn) per clause, deduplicated up to renaming.
DefiniteProgram rv_set(const Program& p);
// rv_set plus pa(A0,Ti) clauses, including those contributed by aggregate
// goals with their free variables renamed apart.
DefiniteProgram dependency_set(const Program& p);

// Least Herbrand model by semi-naive bottom-up evaluation.
class LeastModel {
 public:
  explicit LeastModel(const DefiniteProgram& dp);
  bool entails(const Term& ground_atom) const;
  // Ground instances of pattern in the model, in term order.
  std::vector<Term> enumerate(const Term& pattern) const;
  const std::vector<Term>& facts() const { return facts_; }

 private:
  std::vector<Term> facts_;
  std::unordered_map<Term, std::size_t, TermHash> index_;
};

// Tabled entailment: the model of each distinct program is computed once.
bool entails(const DefiniteProgram& dp, const Term& query);
std::vector<Term> enumerate(const DefiniteProgram& dp, const Term& pattern);

class GroundDependencyDag {
 public:
  GroundDependencyDag() = default;
  // Nodes are ordered by term text; edges are (parent, child). Throws
  // CycleError when the edges contain a cycle.
  GroundDependencyDag(std::vector<Term> nodes, const std::vector<std::pair<Term, Term>>& edges);
  static GroundDependencyDag from_names(const std::vector<std::string>& nodes,
                                        const std::vector<std::pair<std::string, std::string>>& edges);

  std::size_t size() const { return nodes_.size(); }
  const Term& node(RvId id) const { return nodes_[id]; }
  const std::string& name(RvId id) const { return names_[id]; }
  std::optional<RvId> find(const Term& t) const;
  RvId id(const Term& t) const;
  RvId id(const std::string& name) const;
  const std::vector<RvId>& parents(RvId id) const { return parents_[id]; }
  const std::vector<RvId>& children(RvId id) const { return children_[id]; }
  std::size_t topo_rank(RvId id) const { return rank_[id]; }
  const std::vector<RvId>& topo_order() const { return order_; }
  std::size_t edge_count() const;

 private:
  std::vector<Term> nodes_;
  std::vector<std::string> names_;
  std::unordered_map<Term, RvId, TermHash> ids_;
  std::vector<std::vector<RvId>> parents_;
  std::vector<std::vector<RvId>> children_;
  std::vector<std::size_t> rank_;
  std::vector<RvId> order_;
};

GroundDependencyDag ground_dag(const Program& p);

// Pattern lookup over the ground RVs of a DAG.
class RvIndex {
 public:
  RvIndex() = default;
  explicit RvIndex(const GroundDependencyDag& dag);

  std::optional<RvId> find(const Term& ground) const;

  // Calls f(id) for every RV matching pattern under env, in id order, with
  // the pattern's variables bound in env during the call. Stops early and
  // returns true when f returns true.
  template <class F>
  bool for_each_match(const Term& pattern, Env& env, Trail& trail, F&& f) const {
    if (pattern.is_ground()) {
      auto id = find(pattern);
      return id ? f(*id) : false;
    }
    if (pattern.is_var()) return false;
    const std::vector<RvId>* cand = candidates(pattern, env);
    if (!cand) return false;
    for (RvId id : *cand) {
      std::size_t m = trail.mark();
      bool ok = match_slots(pattern, dag_->node(id), env, trail);
      bool stop = ok && f(id);
      trail.undo(env, m);
      if (stop) return true;
    }
    return false;
  }

 private:
  const std::vector<RvId>* candidates(const Term& pattern, const Env& env) const;
  const GroundDependencyDag* dag_ = nullptr;
  std::unordered_map<std::uint64_t, std::vector<RvId>> by_functor_;
  std::unordered_map<std::uint64_t, std::vector<RvId>> by_first_arg_;
};

// A clause with variables renumbered to dense slots 0..slots-1.
struct CompiledClause {
  std::size_t index = 0;
  DistributionalClause clause;
  std::size_t slots = 0;
  // Set when the distribution term is ground.
  std::optional<Distribution> fixed_dist;
};

CompiledClause compile_clause(const DistributionalClause& c, std::size_t index);
// Compiles a body (a query) on its own; names maps slots to source variables.
std::vector<BodyLiteral> compile_body(const std::vector<BodyLiteral>& body, std::size_t& slots,
                                      std::vector<Term>* names = nullptr);

struct HeadMatch {
  std::uint32_t clause;
  Env env;
};

// Static analysis of a validated program, shared read-only by all engines.
class Model {
 public:
  explicit Model(Program p);

  const Program& program() const { return program_; }
  CombiningRule combining() const { return program_.combining; }
  const GroundDependencyDag& dag() const { return dag_; }
  const RvIndex& index() const { return index_; }
  const std::vector<CompiledClause>& clauses() const { return compiled_; }
  // Clauses whose head unifies with RV id, with head bindings.
  const std::vector<HeadMatch>& clauses_for(RvId id) const { return heads_[id]; }

 private:
  Program program_;
  GroundDependencyDag dag_;
  RvIndex index_;
  std::vector<CompiledClause> compiled_;
  std::vector<std::vector<HeadMatch>> heads_;
};

// Problems found by static analysis: empty RV set, unstratified negation,
// cyclic dependencies.
std::vector<Diagnostic> analysis_diagnostics(const Program& p);

}  // namespace dcsharp

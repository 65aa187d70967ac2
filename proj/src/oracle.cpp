#include "dcsharp/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "dcsharp/error.hpp"
#include "dcsharp/eval.hpp"

namespace dcsharp {

namespace {

std::vector<Term> assignment_by_id(const Model& model, const ClosedAssignment& u) {
  const auto& dag = model.dag();
  std::vector<Term> values(dag.size());
  for (const auto& [rv, v] : u) {
    auto id = dag.find(rv);
    if (!id) throw Error(rv.to_string() + " is not an RV of the program");
    values[*id] = v;
  }
  for (RvId id = 0; id < dag.size(); ++id) {
    if (!values[id]) continue;
    for (RvId p : dag.parents(id))
      if (!values[p])
        throw Error("assignment is not closed: " + dag.name(id) + " depends on " + dag.name(p) +
                    ", which is not assigned");
  }
  return values;
}

Term source_names(const Term& t) { return t.is_ground() ? t : rename_term(t, 0); }

struct Grounder {
  const Model& model;
  const std::vector<Term>& values;
  const CompiledClause& cc;
  std::vector<DistributionalClause>& out;

  void run(std::size_t i, Env& env, Trail& trail) {
    const auto& body = cc.clause.body;
    if (i == body.size()) {
      out.push_back(map_terms(cc.clause, [&](const Term& t) { return source_names(instantiate(t, env)); }));
      return;
    }
    const BodyLiteral& lit = body[i];
    if (auto v = lit.value_atom(); v && v->positive) {
      model.index().for_each_match(v->rv, env, trail, [&](RvId id) {
        std::size_t m = trail.mark();
        if (v->value.is_var() && !env[v->value.var_id()]) {
          const Term& val = values[id];
          if (!val) throw Error("internal: grounding reached unassigned " + model.dag().name(id));
          env[v->value.var_id()] = val;
          trail.slots.push_back(v->value.var_id());
        }
        run(i + 1, env, trail);
        trail.undo(env, m);
        return false;
      });
      return;
    }
    if (auto s = lit.stat_model()) {
      bool inputs = std::all_of(s->inputs.begin(), s->inputs.end(),
                                [&](const Term& x) { return slots_ground(x, env); });
      if (inputs && s->output.is_var() && !env[s->output.var_id()]) {
        std::size_t m = trail.mark();
        env[s->output.var_id()] = Term::real(eval_linear(*s, env));
        trail.slots.push_back(s->output.var_id());
        run(i + 1, env, trail);
        trail.undo(env, m);
        return;
      }
    }
    run(i + 1, env, trail);
  }
};

}  // namespace

std::vector<DistributionalClause> ground_program(const Model& model, const ClosedAssignment& u) {
  auto values = assignment_by_id(model, u);
  std::vector<DistributionalClause> out;
  for (const auto& cc : model.clauses()) {
    for (RvId id = 0; id < model.dag().size(); ++id) {
      if (!values[id]) continue;
      for (const auto& hm : model.clauses_for(id)) {
        if (hm.clause != cc.index) continue;
        Env env = hm.env;
        Trail trail;
        Grounder{model, values, cc, out}.run(0, env, trail);
      }
    }
  }
  return out;
}

double assignment_probability(const Model& model, const ClosedAssignment& u) {
  auto values = assignment_by_id(model, u);
  auto look = [&](RvId id) -> const Term* { return values[id] ? &values[id] : nullptr; };
  double total = 0.0;
  for (RvId id = 0; id < values.size(); ++id) {
    if (!values[id]) continue;
    auto r = collect_dst(model, id, look);
    if (r.unknown) throw Error("internal: undecided clause for " + model.dag().name(id));
    if (r.dst.empty()) {
      if (is_undefined(values[id])) continue;
      throw Error("no distribution is defined for " + model.dag().name(id) + " in this assignment");
    }
    if (is_undefined(values[id])) return -std::numeric_limits<double>::infinity();
    total += log_likelihood(combine(model.combining(), r.dst), values[id]);
  }
  return total;
}

namespace {

struct Enumerator {
  const Model& model;
  const std::vector<RvId>& order;
  const EvidenceMap* evidence;
  std::uint64_t budget;
  FunctionRef<void(const std::vector<Term>&, double)> leaf;
  std::vector<Term> world;
  std::uint64_t visited = 0;

  void run(std::size_t k, double p) {
    if (++visited > budget) throw Error("exact enumeration budget exceeded");
    if (k == order.size()) {
      leaf(world, p);
      return;
    }
    RvId id = order[k];
    auto look = [&](RvId r) -> const Term* { return world[r] ? &world[r] : nullptr; };
    auto r = collect_dst(model, id, look);
    if (r.unknown) throw Error("internal: parents of " + model.dag().name(id) + " not assigned");
    const Term* obs = evidence ? evidence->find(id) : nullptr;
    if (r.dst.empty()) {
      if (obs) return;
      world[id] = undefined_value();
      run(k + 1, p);
      world[id] = Term();
      return;
    }
    auto c = combine(model.combining(), r.dst);
    if (c.continuous()) throw Error("oracle is discrete-only");
    if (obs) {
      double q = likelihood(c, *obs);
      if (q <= 0.0) return;
      world[id] = *obs;
      run(k + 1, p * q);
      world[id] = Term();
      return;
    }
    for (const auto& [v, q] : support(c)) {
      if (q <= 0.0) continue;
      world[id] = v;
      run(k + 1, p * q);
    }
    world[id] = Term();
  }
};

std::vector<RvId> ancestral_order(const GroundDependencyDag& dag, std::vector<RvId> seeds) {
  std::vector<std::uint8_t> in(dag.size());
  std::vector<RvId> stack;
  for (RvId s : seeds)
    if (!in[s]) in[s] = 1, stack.push_back(s);
  while (!stack.empty()) {
    RvId u = stack.back();
    stack.pop_back();
    for (RvId p : dag.parents(u))
      if (!in[p]) in[p] = 1, stack.push_back(p);
  }
  std::vector<RvId> order;
  for (RvId id : dag.topo_order())
    if (in[id]) order.push_back(id);
  return order;
}

}  // namespace

double exact_query(const Model& model, const std::vector<BodyLiteral>& query, const Evidence& ev,
                   ExactOptions opt) {
  const auto& dag = model.dag();
  CompiledQuery q = compile_query(query);
  EvidenceMap evidence(dag, ev);
  std::vector<RvId> seeds = query_rvs(model, q);
  seeds.insert(seeds.end(), evidence.ids().begin(), evidence.ids().end());
  auto order = ancestral_order(dag, seeds);
  double num = 0.0, den = 0.0;
  auto leaf = [&](const std::vector<Term>& world, double p) {
    auto look = [&](RvId r) -> const Term* { return world[r] ? &world[r] : nullptr; };
    Env env(q.slots);
    bool holds = false;
    evaluate_body(model, q.body, env, look, [&](Truth t, const Env&) {
      if (t == Truth::Unknown) throw Error("internal: query depends on unassigned RV");
      holds = true;
    });
    den += p;
    if (holds) num += p;
  };
  Enumerator e{model, order, &evidence, opt.budget, leaf, std::vector<Term>(dag.size())};
  e.run(0, 1.0);
  if (den <= 0.0) throw Error("evidence has probability zero");
  return num / den;
}

void enumerate_worlds(const Model& model, FunctionRef<void(const std::vector<Term>&, double)> f,
                      ExactOptions opt) {
  const auto& order = model.dag().topo_order();
  Enumerator e{model, order, nullptr, opt.budget, f, std::vector<Term>(model.dag().size())};
  e.run(0, 1.0);
}

}  // namespace dcsharp

#include "dcsharp/eval.hpp"

#include <algorithm>
#include <map>

#include "dcsharp/error.hpp"

namespace dcsharp {

std::optional<Term> eval_aggregate(AggregateKind kind, std::span<const Term> values) {
  if (values.empty()) return std::nullopt;
  auto require_numbers = [&] {
    for (const auto& v : values)
      if (!v.is_number())
        throw Error(std::string(aggregate_name(kind)) + " needs numeric values, got " + v.to_string());
  };
  switch (kind) {
    case AggregateKind::Cnt:
      return Term::integer(static_cast<std::int64_t>(values.size()));
    case AggregateKind::Sum: {
      require_numbers();
      bool all_int = std::all_of(values.begin(), values.end(),
                                 [](const Term& v) { return v.kind() == TermKind::Integer; });
      if (all_int) {
        std::int64_t s = 0;
        for (const auto& v : values) s += v.int_value();
        return Term::integer(s);
      }
      double s = 0;
      for (const auto& v : values) s += v.number();
      return Term::real(s);
    }
    case AggregateKind::Avg: {
      require_numbers();
      double s = 0;
      for (const auto& v : values) s += v.number();
      return Term::real(s / static_cast<double>(values.size()));
    }
    case AggregateKind::Max:
    case AggregateKind::Min: {
      require_numbers();
      const Term* best = &values[0];
      for (const auto& v : values) {
        if (kind == AggregateKind::Max ? v.number() > best->number() : v.number() < best->number())
          best = &v;
      }
      return *best;
    }
    case AggregateKind::Mode: {
      std::vector<std::pair<Term, std::size_t>> counts;
      for (const auto& v : values) {
        auto it = std::find_if(counts.begin(), counts.end(),
                               [&](const auto& c) { return same_value(c.first, v); });
        if (it == counts.end()) counts.emplace_back(v, 1);
        else ++it->second;
      }
      const std::pair<Term, std::size_t>* best = &counts[0];
      for (const auto& c : counts) {
        if (c.second > best->second ||
            (c.second == best->second && compare_terms(c.first, best->first) < 0))
          best = &c;
      }
      return best->first;
    }
  }
  return std::nullopt;
}

bool compare_values(CompareOp op, const Term& a, const Term& b) {
  if (op == CompareOp::Eq) return same_value(a, b);
  if (!a.is_number() || !b.is_number())
    throw Error("comparison " + a.to_string() + " " + compare_op_text(op) + " " + b.to_string() +
                " needs numbers");
  double x = a.number(), y = b.number();
  switch (op) {
    case CompareOp::Lt: return x < y;
    case CompareOp::Gt: return x > y;
    case CompareOp::Ge: return x >= y;
    case CompareOp::Le: return x <= y;
    case CompareOp::Eq: break;
  }
  return false;
}

double eval_linear(const StatModel& m, const Env& env) {
  double s = m.params.back();
  for (std::size_t i = 0; i < m.inputs.size(); ++i) {
    Term x = instantiate(m.inputs[i], env);
    if (!x.is_number()) throw Error("linear input " + x.to_string() + " is not a number");
    s += m.params[i] * x.number();
  }
  return s;
}

namespace {

// Binds an unbound slot or compares a bound operand with v.
bool match_value(const Term& operand, const Term& v, Env& env, Trail& trail) {
  if (operand.is_var()) {
    Term& slot = env[operand.var_id()];
    if (!slot) {
      slot = v;
      trail.slots.push_back(operand.var_id());
      return true;
    }
    return same_value(slot, v);
  }
  return same_value(operand, v);
}

bool bound(const Term& t, const Env& env) { return slots_ground(t, env); }

struct Evaluator {
  const Model& model;
  ValueLookup look;
  // Set by a callback to end the enumeration.
  bool stop = false;

  void run(const std::vector<BodyLiteral>& body, std::size_t i, Env& env, Trail& trail, Truth acc,
           FunctionRef<void(Truth, const Env&)> cb) {
    if (stop) return;
    if (i == body.size()) {
      cb(acc, env);
      return;
    }
    const BodyLiteral& lit = body[i];
    auto next = [&](Truth t) { run(body, i + 1, env, trail, t, cb); };
    if (auto v = lit.value_atom()) {
      if (v->positive) {
        model.index().for_each_match(v->rv, env, trail, [&](RvId id) {
          const Term* val = look(id);
          if (!val) {
            next(Truth::Unknown);
            return stop;
          }
          if (is_undefined(*val)) return false;
          std::size_t m = trail.mark();
          if (match_value(v->value, *val, env, trail)) next(acc);
          trail.undo(env, m);
          return stop;
        });
        return;
      }
      if (!bound(v->rv, env)) throw Error("negated RV term " + v->rv.to_string() + " is not ground");
      auto id = model.index().find(instantiate(v->rv, env));
      if (!id) return next(acc);
      const Term* val = look(*id);
      if (!val) return next(Truth::Unknown);
      if (is_undefined(*val)) return next(acc);
      bool matches = v->value.is_var() && !env[v->value.var_id()]
                         ? true
                         : same_value(instantiate(v->value, env), *val);
      if (!matches) next(acc);
      return;
    }
    if (auto c = lit.comparison()) {
      if (!bound(c->lhs, env) || !bound(c->rhs, env)) {
        if (acc == Truth::Unknown) return next(Truth::Unknown);
        throw Error("comparison on unbound value in " + to_string(lit));
      }
      if (compare_values(c->op, instantiate(c->lhs, env), instantiate(c->rhs, env))) next(acc);
      return;
    }
    if (auto a = lit.aggregate()) {
      std::vector<Term> values;
      bool unknown = false;
      run(a->goal, 0, env, trail, Truth::True, [&](Truth t, const Env& e) {
        if (t == Truth::Unknown) unknown = true;
        else values.push_back(instantiate(a->templ, e));
      });
      if (unknown) return next(Truth::Unknown);
      auto r = eval_aggregate(a->kind, values);
      std::size_t m = trail.mark();
      bool holds = r && match_value(a->result, *r, env, trail);
      if (!a->positive) {
        trail.undo(env, m);
        holds = !holds;
      }
      if (holds) next(acc);
      trail.undo(env, m);
      return;
    }
    if (auto s = lit.stat_model()) {
      bool inputs = std::all_of(s->inputs.begin(), s->inputs.end(),
                                [&](const Term& x) { return bound(x, env); });
      if (!inputs) {
        if (acc == Truth::Unknown) return next(Truth::Unknown);
        throw Error("linear inputs unbound in " + to_string(lit));
      }
      std::size_t m = trail.mark();
      if (match_value(s->output, Term::real(eval_linear(*s, env)), env, trail)) next(acc);
      trail.undo(env, m);
    }
  }
};

}  // namespace

void evaluate_body(const Model& model, const std::vector<BodyLiteral>& body, Env& env,
                   ValueLookup look, FunctionRef<void(Truth, const Env&)> cb) {
  Evaluator ev{model, look};
  Trail trail;
  ev.run(body, 0, env, trail, Truth::True, cb);
  trail.undo(env, 0);
}

bool prove_body(const Model& model, const std::vector<BodyLiteral>& body, Env& env,
                ValueLookup look) {
  Evaluator ev{model, look};
  Trail trail;
  bool found = false;
  ev.run(body, 0, env, trail, Truth::True, [&](Truth t, const Env&) {
    if (t != Truth::True) throw Error("internal: body decided on an unknown value");
    found = true;
    ev.stop = true;
  });
  trail.undo(env, 0);
  return found;
}

DstResult collect_dst(const Model& model, RvId id, ValueLookup look) {
  DstResult r;
  for (const auto& hm : model.clauses_for(id)) {
    const CompiledClause& cc = model.clauses()[hm.clause];
    Env env = hm.env;
    evaluate_body(model, cc.clause.body, env, look, [&](Truth t, const Env& e) {
      if (t == Truth::Unknown) {
        r.unknown = true;
        return;
      }
      r.dst.push_back(cc.fixed_dist ? *cc.fixed_dist : make_distribution(cc.clause.dist, e));
    });
  }
  return r;
}

}  // namespace dcsharp

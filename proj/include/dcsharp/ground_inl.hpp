#pragma once

#include "dcsharp/error.hpp"
#include "dcsharp/eval.hpp"

namespace dcsharp {

namespace detail {

inline const Term* operand_value(const Operand& o, const Env& env) {
  if (o.slot < 0) return &o.constant;
  const Term& t = env[static_cast<std::size_t>(o.slot)];
  return t ? &t : nullptr;
}

// Binds an unbound slot or compares.
inline bool unify_operand(const Operand& o, const Term& v, Env& env) {
  if (o.slot < 0) return same_value(o.constant, v);
  Term& t = env[static_cast<std::size_t>(o.slot)];
  if (!t) {
    t = v;
    return true;
  }
  return same_value(t, v);
}

}  // namespace detail

template <class ValueFn>
bool eval_ground_body(const GroundBody& b, Env& env, ValueFn&& value) {
  for (const GroundLiteral& lit : b.literals) {
    switch (lit.kind) {
      case GroundLiteral::Kind::Value: {
        if (lit.rv == kNoRv) {
          if (lit.positive) return false;
          break;
        }
        const Term& v = value(lit.rv);
        bool defined = !is_undefined(v);
        if (lit.positive) {
          if (!defined || !detail::unify_operand(lit.value, v, env)) return false;
        } else if (defined) {
          const Term* want = detail::operand_value(lit.value, env);
          if (!want || same_value(*want, v)) return false;
        }
        break;
      }
      case GroundLiteral::Kind::Compare: {
        const Term* a = detail::operand_value(lit.lhs, env);
        const Term* c = detail::operand_value(lit.rhs, env);
        if (!a || !c) throw Error("comparison on unbound value");
        if (!compare_values(lit.op, *a, *c)) return false;
        break;
      }
      case GroundLiteral::Kind::Linear: {
        double s = lit.params.back();
        for (std::size_t i = 0; i < lit.inputs.size(); ++i) {
          const Term* x = detail::operand_value(lit.inputs[i], env);
          if (!x) throw Error("linear input is unbound");
          if (!x->is_number()) throw Error("linear input " + x->to_string() + " is not a number");
          s += lit.params[i] * x->number();
        }
        if (!detail::unify_operand(lit.output, Term::real(s), env)) return false;
        break;
      }
    }
  }
  return true;
}

}  // namespace dcsharp

#include "dcsharp/ground_sampler.hpp"

#include <limits>

#include "dcsharp/error.hpp"

namespace dcsharp {

namespace {

constexpr double kLogZero = -std::numeric_limits<double>::infinity();

// Three-valued truth of a ground body; look returns nullptr for unknown RVs.
template <class Look>
Truth ground_truth(const GroundBody& b, Look&& look) {
  Env env(b.slots);
  Truth acc = Truth::True;
  for (const auto& lit : b.literals) {
    switch (lit.kind) {
      case GroundLiteral::Kind::Value: {
        if (lit.rv == kNoRv) {
          if (lit.positive) return Truth::False;
          break;
        }
        const Term* v = look(lit.rv);
        if (!v) {
          acc = Truth::Unknown;
          break;
        }
        bool defined = !is_undefined(*v);
        if (lit.positive) {
          if (!defined || !detail::unify_operand(lit.value, *v, env)) return Truth::False;
        } else if (defined) {
          const Term* want = detail::operand_value(lit.value, env);
          if (!want) {
            if (lit.value.slot >= 0 && acc == Truth::Unknown) break;
            return Truth::False;
          }
          if (same_value(*want, *v)) return Truth::False;
        }
        break;
      }
      case GroundLiteral::Kind::Compare: {
        const Term* a = detail::operand_value(lit.lhs, env);
        const Term* c = detail::operand_value(lit.rhs, env);
        if (!a || !c) {
          acc = Truth::Unknown;
          break;
        }
        if (!compare_values(lit.op, *a, *c)) return Truth::False;
        break;
      }
      case GroundLiteral::Kind::Linear: {
        double s = lit.params.back();
        bool known = true;
        for (std::size_t i = 0; i < lit.inputs.size(); ++i) {
          const Term* x = detail::operand_value(lit.inputs[i], env);
          if (!x) {
            known = false;
            break;
          }
          s += lit.params[i] * x->number();
        }
        if (!known) {
          acc = Truth::Unknown;
          break;
        }
        if (!detail::unify_operand(lit.output, Term::real(s), env)) return Truth::False;
        break;
      }
    }
  }
  return acc;
}

Distribution clause_distribution(const GroundClause& c, const Env& env) {
  return c.fixed ? *c.fixed : make_distribution(c.dist, env);
}

}  // namespace

GroundSampler::GroundSampler(std::shared_ptr<const GroundModel> gm,
                             std::shared_ptr<const QueryContext> ctx, SamplerOptions opt)
    : gm_(std::move(gm)), ctx_(std::move(ctx)), opt_(opt) {
  if (auto id = gm_->overlapping_clauses())
    throw Error("clauses for " + gm_->model().dag().name(*id) +
                " may fire together; the ground sampler needs mutually exclusive clauses "
                "(use focslw)");
  query_ = gm_->ground_body(ctx_->query.body, ctx_->query.slots);
}

void GroundSampler::check_exclusive_firing(RvId id, std::uint32_t fired,
                                           const SimulationState& st) const {
  auto look = [&](RvId r) -> const Term* {
    if (const Term* e = ctx_->evidence.find(r)) return e;
    return st.asg[r] ? &st.asg[r] : nullptr;
  };
  for (std::uint32_t ci : gm_->clauses_for(id)) {
    if (ci == fired) continue;
    if (ground_truth(gm_->clauses()[ci].body, look) != Truth::False)
      throw Error("audit: clause " + gm_->to_string(gm_->clauses()[ci]) +
                  " is not ruled out when " + gm_->to_string(gm_->clauses()[fired]) + " fires");
  }
}

const Term& GroundSampler::value_of(RvId id, SimulationState& st, bool marked) const {
  if (marked)
    if (const Term* e = ctx_->evidence.find(id)) return *e;
  if (st.asg[id]) return st.asg[id];
  if (st.busy[id]) throw Error("internal: cyclic proof through " + gm_->model().dag().name(id));
  st.touch(id);
  if (marked) st.top[id] = 1;
  st.busy[id] = 1;
  for (std::uint32_t ci : gm_->clauses_for(id)) {
    const GroundClause& c = gm_->clauses()[ci];
    Env env(c.body.slots);
    bool ok = eval_ground_body(c.body, env, [&](RvId r) -> const Term& { return value_of(r, st, marked); });
    if (!ok) continue;
    if (opt_.audit) check_exclusive_firing(id, ci, st);
    Term v = draw(clause_distribution(c, env), st.rng);
    st.busy[id] = 0;
    st.assign(id, std::move(v));
    if (marked) st.schedule(id);
    return st.asg[id];
  }
  st.busy[id] = 0;
  if (opt_.strict)
    throw Error("non-exhaustive ground program: no clause for " + gm_->model().dag().name(id) +
                " fires");
  st.assign(id, undefined_value());
  if (marked) st.schedule(id);
  return st.asg[id];
}

bool GroundSampler::prove_ground(const GroundBody& goal, SimulationState& st) const {
  Env env(goal.slots);
  return eval_ground_body(goal, env, [&](RvId r) -> const Term& { return value_of(r, st, false); });
}

bool GroundSampler::prove_marked_ground(const GroundBody& goal, SimulationState& st) const {
  Env env(goal.slots);
  return eval_ground_body(goal, env, [&](RvId r) -> const Term& { return value_of(r, st, true); });
}

double GroundSampler::weigh(RvId id, SimulationState& st) const {
  const Term& obs = *ctx_->evidence.find(id);
  for (std::uint32_t ci : gm_->clauses_for(id)) {
    const GroundClause& c = gm_->clauses()[ci];
    Env env(c.body.slots);
    bool ok = eval_ground_body(c.body, env, [&](RvId r) -> const Term& { return value_of(r, st, true); });
    if (!ok) continue;
    if (opt_.audit) check_exclusive_firing(id, ci, st);
    return log_likelihood(clause_distribution(c, env), obs);
  }
  if (opt_.strict)
    throw Error("non-exhaustive ground program: no clause for observed " +
                gm_->model().dag().name(id) + " fires");
  return kLogZero;
}

WeightedRow GroundSampler::simulate_ground(SimulationState& st) const {
  bool f = false;
  for (const auto& q : query_) {
    if (prove_marked_ground(q, st)) {
      f = true;
      break;
    }
  }
  const auto& dag = gm_->model().dag();
  RvId a;
  while (st.pop_forward(a)) {
    st.bottom[a] = 1;
    for (RvId c : dag.children(a)) {
      if (ctx_->evidence.observed(c)) {
        if (st.top[c]) continue;
        st.touch(c);
        st.top[c] = 1;
        st.weights.emplace_back(c, weigh(c, st));
      } else {
        st.schedule(c);
      }
    }
  }
  return row_from_state(*ctx_, f, st);
}

std::vector<std::pair<RvId, double>> GroundSampler::weight_res_ground(
    const std::vector<RvId>& residuals, SimulationState& st) const {
  std::vector<std::pair<RvId, double>> out;
  out.reserve(residuals.size());
  for (RvId e : residuals) out.emplace_back(e, weigh(e, st));
  return out;
}

WeightedRow GroundSampler::sample(SimulationState& st) const {
  WeightedRow row = simulate_ground(st);
  for (const auto& [id, w] : weight_res_ground(residual_columns(*ctx_, row), st))
    row.filled.emplace_back(static_cast<std::uint32_t>(ctx_->column_of[id]), w);
  return row;
}

LwSampler::LwSampler(std::shared_ptr<const GroundModel> gm, std::shared_ptr<const QueryContext> ctx,
                     SamplerOptions opt)
    : gm_(std::move(gm)), ctx_(std::move(ctx)), opt_(opt) {
  query_ = gm_->ground_body(ctx_->query.body, ctx_->query.slots);
  for (RvId id : query_rvs(gm_->model(), ctx_->query))
    if (!ctx_->evidence.observed(id)) query_rvs_.push_back(id);
}

std::vector<Distribution> LwSampler::firing(RvId id, SimulationState& st) const {
  auto value = [&](RvId r) -> const Term& {
    if (const Term* e = ctx_->evidence.find(r)) return *e;
    if (!st.asg[r]) throw Error("internal: parent " + gm_->model().dag().name(r) + " not sampled");
    return st.asg[r];
  };
  std::vector<Distribution> dst;
  for (std::uint32_t ci : gm_->clauses_for(id)) {
    const GroundClause& c = gm_->clauses()[ci];
    Env env(c.body.slots);
    if (eval_ground_body(c.body, env, value)) dst.push_back(clause_distribution(c, env));
  }
  return dst;
}

void LwSampler::visit_from_child(RvId id, SimulationState& st) const {
  if (ctx_->evidence.observed(id) || st.top[id]) return;
  st.touch(id);
  st.top[id] = 1;
  for (RvId p : gm_->model().dag().parents(id)) visit_from_child(p, st);
  auto dst = firing(id, st);
  if (dst.empty()) {
    if (opt_.strict)
      throw Error("non-exhaustive program: no clause for " + gm_->model().dag().name(id) + " fires");
    st.assign(id, undefined_value());
  } else {
    st.assign(id, draw(combine(gm_->model().combining(), dst), st.rng));
  }
  st.schedule(id);
}

WeightedRow LwSampler::sample(SimulationState& st) const {
  for (RvId q : query_rvs_) visit_from_child(q, st);
  const auto& dag = gm_->model().dag();
  RvId a;
  while (st.pop_forward(a)) {
    st.bottom[a] = 1;
    for (RvId c : dag.children(a)) {
      if (ctx_->evidence.observed(c)) {
        if (st.top[c]) continue;
        st.touch(c);
        st.top[c] = 1;
        for (RvId p : dag.parents(c)) visit_from_child(p, st);
        auto dst = firing(c, st);
        double w;
        if (dst.empty()) {
          if (opt_.strict)
            throw Error("non-exhaustive program: no clause for observed " + dag.name(c) + " fires");
          w = kLogZero;
        } else {
          w = log_likelihood(combine(gm_->model().combining(), dst), *ctx_->evidence.find(c));
        }
        st.weights.emplace_back(c, w);
      } else {
        st.schedule(c);
      }
    }
  }
  auto value = [&](RvId r) -> const Term& {
    if (const Term* e = ctx_->evidence.find(r)) return *e;
    if (!st.asg[r]) throw Error("internal: query RV " + dag.name(r) + " not sampled");
    return st.asg[r];
  };
  bool f = false;
  for (const auto& q : query_) {
    Env env(q.slots);
    if (eval_ground_body(q, env, value)) {
      f = true;
      break;
    }
  }
  return row_from_state(*ctx_, f, st);
}

}  // namespace dcsharp

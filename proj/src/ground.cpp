#include "dcsharp/ground.hpp"

#include "dcsharp/error.hpp"

namespace dcsharp {

namespace {

Operand to_operand(const Term& t, const Env& env) {
  Operand o;
  if (t.is_var()) {
    const Term& b = env[t.var_id()];
    if (b) o.constant = b;
    else o.slot = static_cast<std::int32_t>(t.var_id());
  } else {
    o.constant = t;
  }
  return o;
}

struct BodyGrounder {
  const Model& model;
  const std::vector<BodyLiteral>& body;
  std::size_t slots;
  std::vector<GroundBody>& out;
  std::vector<Env>* envs = nullptr;

  void run(std::size_t i, Env& env, Trail& trail) {
    if (i == body.size()) {
      out.push_back(convert(env));
      if (envs) envs->push_back(env);
      return;
    }
    const BodyLiteral& lit = body[i];
    if (lit.aggregate())
      throw Error("aggregates are only supported by the first-order sampler (focslw)");
    auto v = lit.value_atom();
    if (v && v->positive && !slots_ground(v->rv, env)) {
      model.index().for_each_match(v->rv, env, trail, [&](RvId) {
        run(i + 1, env, trail);
        return false;
      });
      return;
    }
    run(i + 1, env, trail);
  }

  GroundBody convert(const Env& env) const {
    GroundBody g;
    g.slots = static_cast<std::uint32_t>(slots);
    for (const auto& lit : body) {
      GroundLiteral gl;
      if (auto v = lit.value_atom()) {
        gl.kind = GroundLiteral::Kind::Value;
        gl.positive = v->positive;
        Term rv = instantiate(v->rv, env);
        if (!rv.is_ground()) throw Error("RV term " + rv.to_string() + " is not ground");
        auto id = model.index().find(rv);
        gl.rv = id ? *id : kNoRv;
        gl.value = to_operand(v->value, env);
      } else if (auto c = lit.comparison()) {
        gl.kind = GroundLiteral::Kind::Compare;
        gl.lhs = to_operand(c->lhs, env);
        gl.rhs = to_operand(c->rhs, env);
        gl.op = c->op;
      } else if (auto s = lit.stat_model()) {
        gl.kind = GroundLiteral::Kind::Linear;
        for (const auto& x : s->inputs) gl.inputs.push_back(to_operand(x, env));
        gl.params = s->params;
        gl.output = to_operand(s->output, env);
      }
      g.literals.push_back(std::move(gl));
    }
    return g;
  }
};

bool excludes(const GroundLiteral& a, const GroundLiteral& b) {
  if (a.kind != GroundLiteral::Kind::Value || b.kind != GroundLiteral::Kind::Value) return false;
  if (a.rv != b.rv || a.rv == kNoRv) return false;
  if (a.value.slot >= 0 || b.value.slot >= 0) return false;
  bool same = same_value(a.value.constant, b.value.constant);
  if (a.positive && b.positive) return !same;
  if (a.positive != b.positive) return same;
  return false;
}

bool never_fires(const GroundBody& b) {
  for (const auto& l : b.literals)
    if (l.kind == GroundLiteral::Kind::Value && l.positive && l.rv == kNoRv) return true;
  return false;
}

bool exclusive(const GroundBody& x, const GroundBody& y) {
  if (never_fires(x) || never_fires(y)) return true;
  for (const auto& a : x.literals)
    for (const auto& b : y.literals)
      if (excludes(a, b)) return true;
  return false;
}

std::string operand_text(const Operand& o) {
  return o.slot < 0 ? o.constant.to_string() : "_V" + std::to_string(o.slot);
}

}  // namespace

GroundModel::GroundModel(std::shared_ptr<const Model> model) : model_(std::move(model)) {
  const Model& m = *model_;
  by_head_.assign(m.dag().size(), {});
  for (RvId id = 0; id < m.dag().size(); ++id) {
    for (const auto& hm : m.clauses_for(id)) {
      const CompiledClause& cc = m.clauses()[hm.clause];
      std::vector<GroundBody> bodies;
      std::vector<Env> envs;
      BodyGrounder g{m, cc.clause.body, cc.slots, bodies, &envs};
      Env env = hm.env;
      Trail trail;
      g.run(0, env, trail);
      for (std::size_t k = 0; k < bodies.size(); ++k) {
        GroundClause gc;
        gc.head = id;
        gc.source = hm.clause;
        gc.body = std::move(bodies[k]);
        if (cc.fixed_dist) {
          gc.fixed = cc.fixed_dist;
        } else {
          const Env& e = envs[k];
          gc.dist = cc.clause.dist;
          for (auto& p : gc.dist.params) p = instantiate(p, e);
          for (auto& [pr, v] : gc.dist.entries) {
            pr = instantiate(pr, e);
            v = instantiate(v, e);
          }
          std::vector<Term> vars;
          dist_variables(gc.dist, vars);
          if (vars.empty()) gc.fixed = make_distribution(gc.dist, Env{});
        }
        by_head_[id].push_back(static_cast<std::uint32_t>(clauses_.size()));
        clauses_.push_back(std::move(gc));
      }
    }
  }
}

std::vector<GroundBody> GroundModel::ground_body(const std::vector<BodyLiteral>& body,
                                                 std::size_t slots) const {
  std::vector<GroundBody> out;
  BodyGrounder g{*model_, body, slots, out};
  Env env(slots);
  Trail trail;
  g.run(0, env, trail);
  return out;
}

std::optional<RvId> GroundModel::overlapping_clauses() const {
  for (RvId id = 0; id < by_head_.size(); ++id) {
    const auto& cs = by_head_[id];
    for (std::size_t i = 0; i < cs.size(); ++i)
      for (std::size_t j = i + 1; j < cs.size(); ++j)
        if (!exclusive(clauses_[cs[i]].body, clauses_[cs[j]].body)) return id;
  }
  return std::nullopt;
}

std::string GroundModel::to_string(const GroundClause& c) const {
  std::string s = model_->dag().name(c.head) + " ~ " +
                  (c.fixed ? c.fixed->to_string() : dcsharp::to_string(c.dist));
  for (std::size_t i = 0; i < c.body.literals.size(); ++i) {
    const auto& l = c.body.literals[i];
    s += i ? ", " : " <- ";
    switch (l.kind) {
      case GroundLiteral::Kind::Value:
        s += std::string(l.positive ? "" : "\\+ ") +
             (l.rv == kNoRv ? std::string("<not an RV>") : model_->dag().name(l.rv)) + " ~= " +
             operand_text(l.value);
        break;
      case GroundLiteral::Kind::Compare:
        s += operand_text(l.lhs) + " " + compare_op_text(l.op) + " " + operand_text(l.rhs);
        break;
      case GroundLiteral::Kind::Linear:
        s += "linear(...," + operand_text(l.output) + ")";
        break;
    }
  }
  return s + ".";
}

}  // namespace dcsharp

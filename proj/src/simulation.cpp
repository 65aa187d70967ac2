#include "dcsharp/simulation.hpp"

#include <algorithm>

#include "dcsharp/error.hpp"

namespace dcsharp {

EvidenceMap::EvidenceMap(const GroundDependencyDag& dag, const Evidence& ev)
    : values_(dag.size()), mask_(dag.size()) {
  for (const auto& o : ev) {
    auto id = dag.find(o.rv);
    if (!id) throw Error("evidence on " + o.rv.to_string() + ", which is not an RV of the program");
    if (values_[*id]) {
      if (!same_value(values_[*id], o.value))
        throw Error("conflicting evidence on " + o.rv.to_string());
      continue;
    }
    values_[*id] = o.value;
    mask_[*id] = 1;
    ids_.push_back(*id);
  }
  std::sort(ids_.begin(), ids_.end());
}

CompiledQuery compile_query(const std::vector<BodyLiteral>& query) {
  CompiledQuery q;
  q.body = compile_body(query, q.slots, &q.names);
  return q;
}

namespace {

void collect_rvs(const Model& m, const std::vector<BodyLiteral>& body, std::size_t slots,
                 std::vector<RvId>& out) {
  for (const auto& lit : body) {
    if (auto v = lit.value_atom()) {
      Env env(slots);
      Trail trail;
      m.index().for_each_match(v->rv, env, trail, [&](RvId id) {
        out.push_back(id);
        return false;
      });
    } else if (auto a = lit.aggregate()) {
      collect_rvs(m, a->goal, slots, out);
    }
  }
}

}  // namespace

std::vector<RvId> query_rvs(const Model& model, const CompiledQuery& q) {
  std::vector<RvId> out;
  collect_rvs(model, q.body, q.slots, out);
  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

QueryContext make_query_context(std::shared_ptr<const Model> model,
                                const std::vector<BodyLiteral>& query, const Evidence& ev) {
  QueryContext ctx;
  ctx.model = std::move(model);
  const auto& dag = ctx.model->dag();
  ctx.query = compile_query(query);
  ctx.evidence = EvidenceMap(dag, ev);
  std::vector<RvId> q;
  for (RvId id : query_rvs(*ctx.model, ctx.query))
    if (!ctx.evidence.observed(id)) q.push_back(id);
  ctx.classification = classify(dag, q, ctx.evidence.ids());
  ctx.columns = ctx.classification.diagnostic;
  ctx.column_of.assign(dag.size(), -1);
  for (std::size_t i = 0; i < ctx.columns.size(); ++i)
    ctx.column_of[ctx.columns[i]] = static_cast<std::int32_t>(i);
  return ctx;
}

SimulationState::SimulationState(std::size_t n)
    : asg(n), top(n), bottom(n), queued(n), busy(n), dirty(n), dst(n), stamp(n) {}

void SimulationState::reset(Rng r) {
  rng = r;
  for (RvId id : touched) {
    asg[id] = Term();
    top[id] = bottom[id] = queued[id] = busy[id] = dirty[id] = 0;
    dst[id].clear();
    stamp[id] = 0;
  }
  touched.clear();
  forward.clear();
  forward_head = 0;
  weights.clear();
  assigned.clear();
  clock = 0;
}

void SimulationState::touch(RvId id) {
  if (dirty[id]) return;
  dirty[id] = 1;
  touched.push_back(id);
}

void SimulationState::assign(RvId id, Term v) {
  if (asg[id]) throw Error("internal: RV assigned twice in one simulation");
  touch(id);
  asg[id] = std::move(v);
  stamp[id] = ++clock;
  assigned.push_back(id);
}

void SimulationState::schedule(RvId id) {
  if (bottom[id] || queued[id]) return;
  touch(id);
  queued[id] = 1;
  forward.push_back(id);
}

bool SimulationState::pop_forward(RvId& out) {
  if (forward_head == forward.size()) return false;
  out = forward[forward_head++];
  return true;
}

WeightedRow row_from_state(const QueryContext& ctx, bool f, const SimulationState& st) {
  WeightedRow row;
  row.f = f;
  row.natural.reserve(st.weights.size());
  for (const auto& [id, w] : st.weights) {
    std::int32_t col = ctx.column_of[id];
    if (col < 0)
      throw Error("internal: weighted evidence " + ctx.model->dag().name(id) +
                  " is outside the diagnostic set");
    row.natural.emplace_back(static_cast<std::uint32_t>(col), w);
  }
  return row;
}

std::vector<RvId> residual_columns(const QueryContext& ctx, const WeightedRow& row) {
  std::vector<std::uint8_t> have(ctx.columns.size());
  for (const auto& [col, w] : row.natural) have[col] = 1;
  std::vector<RvId> out;
  for (std::size_t c = 0; c < ctx.columns.size(); ++c)
    if (!have[c]) out.push_back(ctx.columns[c]);
  return out;
}

}  // namespace dcsharp

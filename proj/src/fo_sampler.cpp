#include "dcsharp/fo_sampler.hpp"

#include <limits>

#include "dcsharp/error.hpp"

namespace dcsharp {

FoSampler::FoSampler(std::shared_ptr<const QueryContext> ctx, SamplerOptions opt)
    : ctx_(std::move(ctx)), opt_(opt) {}

std::vector<Distribution> FoSampler::collect(RvId id, SimulationState& st,
                                             std::vector<RvId>* reads) const {
  auto look = [&](RvId r) -> const Term* {
    if (reads) reads->push_back(r);
    return &value_of(r, st);
  };
  return collect_dst(*ctx_->model, id, look).dst;
}

void FoSampler::audit_firing(RvId id, std::size_t fired, const std::vector<RvId>& reads,
                             const SimulationState& st) const {
  const auto& dag = ctx_->model->dag();
  auto known = [&](RvId r) -> const Term* {
    if (const Term* e = ctx_->evidence.find(r)) return e;
    return st.asg[r] ? &st.asg[r] : nullptr;
  };
  auto r = collect_dst(*ctx_->model, id, known);
  if (r.unknown || r.dst.size() != fired)
    throw Error("audit: clauses for " + dag.name(id) + " are not decided by the sampled context");
  if (!st.asg[id]) return;
  for (RvId p : reads)
    if (!ctx_->evidence.observed(p) && !(st.stamp[p] < st.stamp[id]))
      throw Error("audit: " + dag.name(id) + " was assigned before " + dag.name(p));
}

const Term& FoSampler::value_of(RvId id, SimulationState& st) const {
  if (const Term* e = ctx_->evidence.find(id)) return *e;
  if (st.asg[id]) return st.asg[id];
  const auto& dag = ctx_->model->dag();
  if (st.busy[id]) throw Error("internal: cyclic proof through " + dag.name(id));
  st.touch(id);
  st.top[id] = 1;
  st.busy[id] = 1;
  std::vector<RvId> reads;
  auto dst = collect(id, st, opt_.audit ? &reads : nullptr);
  st.busy[id] = 0;
  if (dst.empty()) {
    if (opt_.strict) throw Error("non-exhaustive program: no clause for " + dag.name(id) + " fires");
    st.assign(id, undefined_value());
  } else {
    st.assign(id, draw(combine(ctx_->model->combining(), dst), st.rng));
  }
  if (opt_.audit) {
    audit_firing(id, dst.size(), reads, st);
    st.dst[id] = std::move(dst);
  }
  st.schedule(id);
  return st.asg[id];
}

bool FoSampler::prove_marked(const std::vector<BodyLiteral>& goal, Env& env,
                             SimulationState& st) const {
  auto look = [&](RvId r) -> const Term* { return &value_of(r, st); };
  return prove_body(*ctx_->model, goal, env, look);
}

double FoSampler::weigh(RvId id, SimulationState& st) const {
  const auto& dag = ctx_->model->dag();
  std::vector<RvId> reads;
  auto dst = collect(id, st, opt_.audit ? &reads : nullptr);
  if (opt_.audit) audit_firing(id, dst.size(), reads, st);
  if (dst.empty()) {
    if (opt_.strict)
      throw Error("non-exhaustive program: no clause for observed " + dag.name(id) + " fires");
    return -std::numeric_limits<double>::infinity();
  }
  double w = log_likelihood(combine(ctx_->model->combining(), dst), *ctx_->evidence.find(id));
  if (opt_.audit) st.dst[id] = std::move(dst);
  return w;
}

WeightedRow FoSampler::simulate_fo(SimulationState& st) const {
  Env env(ctx_->query.slots);
  bool f = prove_marked(ctx_->query.body, env, st);
  const auto& dag = ctx_->model->dag();
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

std::vector<std::pair<RvId, double>> FoSampler::weight_residuals(const std::vector<RvId>& residuals,
                                                                 SimulationState& st) const {
  std::vector<std::pair<RvId, double>> out;
  out.reserve(residuals.size());
  for (RvId e : residuals) {
    st.touch(e);
    out.emplace_back(e, weigh(e, st));
  }
  return out;
}

WeightedRow FoSampler::sample(SimulationState& st) const {
  WeightedRow row = simulate_fo(st);
  for (const auto& [id, w] : weight_residuals(residual_columns(*ctx_, row), st))
    row.filled.emplace_back(static_cast<std::uint32_t>(ctx_->column_of[id]), w);
  return row;
}

}  // namespace dcsharp

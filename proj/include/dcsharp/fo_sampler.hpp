#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "dcsharp/eval.hpp"
#include "dcsharp/simulation.hpp"

namespace dcsharp {

// CS-LW on first-order programs. Every clause for an RV that fires
// contributes to its distribution through the program's combining rule.
class FoSampler : public RowSampler {
 public:
  FoSampler(std::shared_ptr<const QueryContext> ctx, SamplerOptions opt = {});

  const QueryContext& context() const override { return *ctx_; }

  // Proves goal under env, sampling what it reads; stops at the first answer.
  bool prove_marked(const std::vector<BodyLiteral>& goal, Env& env, SimulationState& st) const;
  // Query proof and forward pass; no fill-ins.
  WeightedRow simulate_fo(SimulationState& st) const;
  std::vector<std::pair<RvId, double>> weight_residuals(const std::vector<RvId>& residuals,
                                                        SimulationState& st) const;
  WeightedRow sample(SimulationState& st) const override;

 private:
  const Term& value_of(RvId id, SimulationState& st) const;
  std::vector<Distribution> collect(RvId id, SimulationState& st, std::vector<RvId>* reads) const;
  double weigh(RvId id, SimulationState& st) const;
  void audit_firing(RvId id, std::size_t fired, const std::vector<RvId>& reads,
                    const SimulationState& st) const;

  std::shared_ptr<const QueryContext> ctx_;
  SamplerOptions opt_;
};

}  // namespace dcsharp

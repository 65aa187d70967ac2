#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "dcsharp/ground.hpp"
#include "dcsharp/simulation.hpp"

namespace dcsharp {

// CS-LW on a ground program whose clauses for each RV are mutually exclusive.
class GroundSampler : public RowSampler {
 public:
  // Throws when some RV has clauses that may fire together.
  GroundSampler(std::shared_ptr<const GroundModel> gm, std::shared_ptr<const QueryContext> ctx,
                SamplerOptions opt = {});

  const QueryContext& context() const override { return *ctx_; }
  const GroundModel& ground() const { return *gm_; }

  // Proof without evidence: values come from Asg or are sampled.
  bool prove_ground(const GroundBody& goal, SimulationState& st) const;
  // Proof with evidence lookups, Top marks and Forward scheduling.
  bool prove_marked_ground(const GroundBody& goal, SimulationState& st) const;
  // Query proof and forward pass; no fill-ins.
  WeightedRow simulate_ground(SimulationState& st) const;
  // Log-weights of the given residual evidence, sampling what their clause
  // bodies need.
  std::vector<std::pair<RvId, double>> weight_res_ground(const std::vector<RvId>& residuals,
                                                         SimulationState& st) const;
  WeightedRow sample(SimulationState& st) const override;

 private:
  const Term& value_of(RvId id, SimulationState& st, bool marked) const;
  double weigh(RvId id, SimulationState& st) const;
  void check_exclusive_firing(RvId id, std::uint32_t fired, const SimulationState& st) const;

  std::shared_ptr<const GroundModel> gm_;
  std::shared_ptr<const QueryContext> ctx_;
  SamplerOptions opt_;
  std::vector<GroundBody> query_;
};

// Likelihood weighting driven by Bayes-ball: samples the requisite
// unobserved RVs from all parents and weighs every diagnostic observation.
class LwSampler : public RowSampler {
 public:
  LwSampler(std::shared_ptr<const GroundModel> gm, std::shared_ptr<const QueryContext> ctx,
            SamplerOptions opt = {});

  const QueryContext& context() const override { return *ctx_; }
  WeightedRow sample(SimulationState& st) const override;

 private:
  void visit_from_child(RvId id, SimulationState& st) const;
  std::vector<Distribution> firing(RvId id, SimulationState& st) const;

  std::shared_ptr<const GroundModel> gm_;
  std::shared_ptr<const QueryContext> ctx_;
  SamplerOptions opt_;
  std::vector<GroundBody> query_;
  std::vector<RvId> query_rvs_;
};

}  // namespace dcsharp

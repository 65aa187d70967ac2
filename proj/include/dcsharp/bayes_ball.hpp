#pragma once

#include <vector>

#include "dcsharp/analysis.hpp"

namespace dcsharp {

struct RequisiteClassification {
  std::vector<RvId> diagnostic;            // observed, marked on top
  std::vector<RvId> predictive;            // observed, visited, not on top
  std::vector<RvId> requisite_unobserved;  // unobserved, marked on top
  std::vector<std::uint8_t> visited;
};

// Bayes-ball marks, starting from the query nodes as if visited from a child.
RequisiteClassification classify(const GroundDependencyDag& dag, const std::vector<RvId>& query,
                                 const std::vector<RvId>& evidence);

// True iff every path between X and Y is blocked by Z (exhaustive search).
bool dsep(const GroundDependencyDag& dag, const std::vector<RvId>& x, const std::vector<RvId>& y,
          const std::vector<RvId>& z);

// Unobserved requisite ancestors of e reachable through unobserved nodes.
std::vector<RvId> basis(const GroundDependencyDag& dag, RvId e,
                        const std::vector<std::uint8_t>& observed,
                        const RequisiteClassification& cls);

}  // namespace dcsharp

#pragma once

#include <random>
#include <string>
#include <vector>

#include "dcsharp/bayes_ball.hpp"

namespace dcsharp::test {

struct RandomDag {
  std::vector<std::string> nodes;
  std::vector<std::pair<std::string, std::string>> edges;
};

inline RandomDag random_dag(std::mt19937_64& rng, int max_nodes, int max_parents) {
  RandomDag g;
  int n = 2 + static_cast<int>(rng() % (max_nodes - 1));
  for (int i = 0; i < n; ++i) g.nodes.push_back("n" + std::to_string(i));
  for (int i = 1; i < n; ++i) {
    int k = static_cast<int>(rng() % (std::min(i, max_parents) + 1));
    std::vector<int> cand(i);
    for (int j = 0; j < i; ++j) cand[j] = j;
    std::shuffle(cand.begin(), cand.end(), rng);
    for (int j = 0; j < k; ++j) g.edges.emplace_back(g.nodes[cand[j]], g.nodes[i]);
  }
  return g;
}

// Compares classify against d-separation: a node is marked on top iff an
// extra root parent attached to it is d-connected to the query given the
// evidence; an observed node is visited iff it is d-connected to the query
// given the other evidence. Returns an empty string on agreement.
inline std::string check_classification(const RandomDag& g, const std::vector<RvId>& query,
                                        const std::vector<RvId>& evidence) {
  auto dag = GroundDependencyDag::from_names(g.nodes, g.edges);
  auto cls = classify(dag, query, evidence);
  std::vector<std::uint8_t> observed(dag.size()), top(dag.size());
  for (RvId e : evidence) observed[e] = 1;
  for (RvId v : cls.diagnostic) top[v] = 1;
  for (RvId v : cls.requisite_unobserved) top[v] = 1;

  auto aug_nodes = g.nodes;
  auto aug_edges = g.edges;
  for (const auto& n : g.nodes) {
    aug_nodes.push_back("theta_" + n);
    aug_edges.emplace_back("theta_" + n, n);
  }
  auto aug = GroundDependencyDag::from_names(aug_nodes, aug_edges);
  auto map_ids = [&](const std::vector<RvId>& ids) {
    std::vector<RvId> out;
    for (RvId i : ids) out.push_back(aug.id(dag.name(i)));
    return out;
  };
  auto aq = map_ids(query), ae = map_ids(evidence);
  for (RvId v = 0; v < dag.size(); ++v) {
    RvId theta = aug.id("theta_" + dag.name(v));
    bool connected = !dsep(aug, {theta}, aq, ae);
    if (connected != static_cast<bool>(top[v]))
      return "top mark of " + dag.name(v) + " disagrees with d-separation";
    if (observed[v]) {
      std::vector<RvId> rest;
      for (RvId e : evidence)
        if (e != v) rest.push_back(e);
      bool reach = !dsep(dag, {v}, query, rest);
      if (reach != static_cast<bool>(cls.visited[v]))
        return "visit of evidence " + dag.name(v) + " disagrees with d-separation";
    }
  }
  for (RvId v : cls.diagnostic)
    for (RvId w : cls.predictive)
      if (v == w) return "diagnostic and predictive overlap";
  return "";
}

inline std::string random_classification_trial(std::mt19937_64& rng) {
  auto g = random_dag(rng, 10, 3);
  std::size_t n = g.nodes.size();
  std::vector<RvId> perm(n);
  for (RvId i = 0; i < n; ++i) perm[i] = i;
  std::shuffle(perm.begin(), perm.end(), rng);
  std::size_t nq = 1 + rng() % std::min<std::size_t>(2, n - 1);
  std::size_t ne = rng() % (n - nq + 1);
  std::vector<RvId> q(perm.begin(), perm.begin() + nq);
  std::vector<RvId> e(perm.begin() + nq, perm.begin() + nq + ne);
  // Names sort lexicographically, so map node names to ids via a DAG.
  auto dag = GroundDependencyDag::from_names(g.nodes, g.edges);
  std::vector<RvId> qi, ei;
  for (RvId i : q) qi.push_back(dag.id(g.nodes[i]));
  for (RvId i : e) ei.push_back(dag.id(g.nodes[i]));
  return check_classification(g, qi, ei);
}

}  // namespace dcsharp::test

#include "dcsharp/bayes_ball.hpp"

#include <algorithm>
#include <deque>

#include "dcsharp/error.hpp"

namespace dcsharp {

namespace {

void check_nodes(const GroundDependencyDag& dag, const std::vector<RvId>& ids) {
  for (RvId id : ids)
    if (id >= dag.size()) throw Error("unknown node id " + std::to_string(id));
}

}  // namespace

RequisiteClassification classify(const GroundDependencyDag& dag, const std::vector<RvId>& query,
                                 const std::vector<RvId>& evidence) {
  check_nodes(dag, query);
  check_nodes(dag, evidence);
  std::size_t n = dag.size();
  std::vector<std::uint8_t> observed(n), visited(n), top(n), bottom(n);
  for (RvId e : evidence) observed[e] = 1;
  for (RvId q : query)
    if (observed[q]) throw Error("query node " + dag.name(q) + " is observed");

  struct Visit {
    RvId node;
    bool from_child;
  };
  std::deque<Visit> schedule;
  for (RvId q : query) schedule.push_back({q, true});
  while (!schedule.empty()) {
    Visit v = schedule.front();
    schedule.pop_front();
    RvId j = v.node;
    visited[j] = 1;
    if (v.from_child) {
      if (observed[j]) continue;
      if (!top[j]) {
        top[j] = 1;
        for (RvId p : dag.parents(j)) schedule.push_back({p, true});
      }
      if (!bottom[j]) {
        bottom[j] = 1;
        for (RvId c : dag.children(j)) schedule.push_back({c, false});
      }
    } else if (observed[j]) {
      if (!top[j]) {
        top[j] = 1;
        for (RvId p : dag.parents(j)) schedule.push_back({p, true});
      }
    } else if (!bottom[j]) {
      bottom[j] = 1;
      for (RvId c : dag.children(j)) schedule.push_back({c, false});
    }
  }

  RequisiteClassification out;
  for (RvId i = 0; i < n; ++i) {
    if (observed[i] && top[i]) out.diagnostic.push_back(i);
    else if (observed[i] && visited[i]) out.predictive.push_back(i);
    else if (!observed[i] && top[i]) out.requisite_unobserved.push_back(i);
  }
  out.visited = std::move(visited);
  return out;
}

namespace {

struct PathSearch {
  const GroundDependencyDag& dag;
  std::vector<std::uint8_t> in_z, in_y, on_path, z_or_desc;

  // A collider is open when it or one of its descendants is in Z.
  void mark_ancestors_of_z() {
    std::vector<RvId> stack;
    for (RvId i = 0; i < dag.size(); ++i)
      if (in_z[i]) stack.push_back(i);
    while (!stack.empty()) {
      RvId u = stack.back();
      stack.pop_back();
      if (z_or_desc[u]) continue;
      z_or_desc[u] = 1;
      for (RvId p : dag.parents(u)) stack.push_back(p);
    }
  }

  // arrived_into: the edge we came by points into node. into_next: the next
  // edge points away from node, into next.
  bool extend(RvId node, bool arrived_into, bool first) {
    if (!first && in_y[node]) return true;
    auto step = [&](RvId next, bool into_next) {
      if (on_path[next]) return false;
      if (!first) {
        bool collider = arrived_into && !into_next;
        if (collider) {
          if (!z_or_desc[node]) return false;
        } else if (in_z[node]) {
          return false;
        }
      }
      on_path[next] = 1;
      bool r = extend(next, into_next, false);
      on_path[next] = 0;
      return r;
    };
    for (RvId c : dag.children(node))
      if (step(c, true)) return true;
    for (RvId p : dag.parents(node))
      if (step(p, false)) return true;
    return false;
  }
};

}  // namespace

bool dsep(const GroundDependencyDag& dag, const std::vector<RvId>& x, const std::vector<RvId>& y,
          const std::vector<RvId>& z) {
  std::size_t n = dag.size();
  PathSearch s{dag, std::vector<std::uint8_t>(n), std::vector<std::uint8_t>(n),
               std::vector<std::uint8_t>(n), std::vector<std::uint8_t>(n)};
  for (RvId v : z) s.in_z[v] = 1;
  for (RvId v : y) s.in_y[v] = 1;
  s.mark_ancestors_of_z();
  for (RvId start : x) {
    if (s.in_y[start]) return false;
    s.on_path[start] = 1;
    bool active = s.extend(start, false, true);
    s.on_path[start] = 0;
    if (active) return false;
  }
  return true;
}

std::vector<RvId> basis(const GroundDependencyDag& dag, RvId e,
                        const std::vector<std::uint8_t>& observed,
                        const RequisiteClassification& cls) {
  std::vector<std::uint8_t> requisite(dag.size()), seen(dag.size());
  for (RvId r : cls.requisite_unobserved) requisite[r] = 1;
  std::vector<RvId> stack{e}, out;
  while (!stack.empty()) {
    RvId u = stack.back();
    stack.pop_back();
    for (RvId p : dag.parents(u)) {
      if (seen[p] || observed[p] || !requisite[p]) continue;
      seen[p] = 1;
      out.push_back(p);
      stack.push_back(p);
    }
  }
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace dcsharp

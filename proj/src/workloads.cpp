#include "dcsharp/workloads.hpp"

#include <algorithm>
#include <random>

#include "dcsharp/error.hpp"

namespace dcsharp {

namespace {

std::string constant(char prefix, std::size_t i) { return prefix + std::to_string(i + 1); }

void observe(Evidence& ev, const std::string& rv, const char* value) {
  ev.push_back({parse_term(rv), parse_term(value)});
}

}  // namespace

std::string bank_program(std::size_t n) {
  if (n == 0) throw Error("domain size must be positive");
  std::string s;
  for (char p : {'c', 'a', 'l'}) {
    const char* pred = p == 'c' ? "client" : p == 'a' ? "account" : "loan";
    for (std::size_t i = 0; i < n; ++i) s += std::string(pred) + "(" + constant(p, i) + ") ~ val(t).\n";
  }
  s +=
      "home_loan(L) ~ bernoulli(0.7) <- loan(L) ~= t.\n"
      "high_savings(A) ~ bernoulli(0.3) <- account(A) ~= t.\n"
      "has_account(C,A) ~ bernoulli(0.01) <- client(C) ~= t, account(A) ~= t.\n"
      "account_loan(A,L) ~ bernoulli(0.02) <- account(A) ~= t, loan(L) ~= t.\n"
      "has_loan(C,L) ~ bernoulli(0.9) <- has_account(C,A) ~= t, account_loan(A,L) ~= t.\n"
      "has_loan(C,L) ~ bernoulli(0.001) <- client(C) ~= t, loan(L) ~= t.\n"
      "debt(C) ~ bernoulli(0.9) <- has_loan(C,L) ~= t, home_loan(L) ~= t.\n"
      "debt(C) ~ bernoulli(0.6) <- has_loan(C,L) ~= t, home_loan(L) ~= f.\n"
      "debt(C) ~ bernoulli(0.3) <- has_account(C,A) ~= t, high_savings(A) ~= f.\n"
      "debt(C) ~ bernoulli(0.01) <- client(C) ~= t.\n";
  return s;
}

Evidence bank_debt_evidence(std::size_t n) {
  if (n == 0) throw Error("domain size must be positive");
  Evidence ev;
  for (std::size_t i = 0; i < n; ++i) {
    const std::string c = constant('c', i), a = constant('a', i), l = constant('l', i);
    observe(ev, "client(" + c + ")", "t");
    observe(ev, "account(" + a + ")", "t");
    observe(ev, "loan(" + l + ")", "t");
    observe(ev, "home_loan(" + l + ")", "t");
    observe(ev, "high_savings(" + a + ")", "f");
    if (i > 0) observe(ev, "debt(" + c + ")", "t");
  }
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) {
      observe(ev, "has_account(" + constant('c', i) + "," + constant('a', j) + ")", "t");
      observe(ev, "account_loan(" + constant('a', i) + "," + constant('l', j) + ")", "t");
      observe(ev, "has_loan(" + constant('c', i) + "," + constant('l', j) + ")", "f");
    }
  return ev;
}

std::string bank_debt_query() { return "debt(c1) ~= t"; }

BnTask random_bn_task(std::size_t n_nodes, std::uint64_t seed) {
  if (n_nodes < 2) throw Error("random tasks need at least 2 nodes");
  BnTask task;
  task.pair = random_tree_bn(n_nodes, 4, 0.4, seed);
  const BayesNet& net = task.pair.net;
  std::mt19937_64 rng(seed ^ 0x5eedULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  // Variables are already in topological order.
  std::vector<std::size_t> world(n_nodes);
  for (std::size_t v = 0; v < n_nodes; ++v) {
    std::size_t row = 0;
    for (std::size_t p : net.cpts[v].parents) row = row * 2 + world[p];
    world[v] = unit(rng) < net.cpts[v].rows[row][0] ? 0 : 1;
  }
  // Query a node from the later half with at least two parents where one
  // exists, and observe a fifth of the remaining nodes.
  std::vector<std::size_t> cand;
  for (std::size_t v = n_nodes / 2; v < n_nodes; ++v)
    if (net.cpts[v].parents.size() >= 2) cand.push_back(v);
  if (cand.empty())
    for (std::size_t v = n_nodes / 2; v < n_nodes; ++v) cand.push_back(v);
  const std::size_t q = cand[std::uniform_int_distribution<std::size_t>(0, cand.size() - 1)(rng)];
  std::vector<std::size_t> observed;
  for (std::size_t v = 0; v < n_nodes; ++v)
    if (v != q) observed.push_back(v);
  std::shuffle(observed.begin(), observed.end(), rng);
  observed.resize(std::max<std::size_t>(1, n_nodes / 5));
  std::sort(observed.begin(), observed.end());
  BnEvidence ev;
  for (std::size_t v : observed) {
    ev.emplace_back(v, world[v]);
    observe(task.evidence, net.variables[v].name, world[v] == 0 ? "t" : "f");
  }
  task.query = net.variables[q].name + " ~= t";
  task.exact = bn_posterior(net, q, 0, ev);
  return task;
}

}  // namespace dcsharp

#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "dcsharp/syntax.hpp"

namespace dcsharp {

struct BnVariable {
  std::string name;
  std::vector<std::string> states;
};

// P(child | parents). rows[k] is the distribution over the child's states for
// the k-th parent configuration, row-major with the last parent fastest.
struct BnCpt {
  std::size_t child = 0;
  std::vector<std::size_t> parents;
  std::vector<std::vector<double>> rows;
};

struct BayesNet {
  std::string name;
  std::vector<BnVariable> variables;
  // One per variable, indexed by variable.
  std::vector<BnCpt> cpts;

  std::size_t index_of(std::string_view name) const;
};

// BIF 0.3 discrete subset. Throws ParseError with a location.
BayesNet parse_bif(std::string_view text);
std::string to_bif(const BayesNet& net);

// (variable, state index)
using BnEvidence = std::vector<std::pair<std::size_t, std::size_t>>;

// Exact P(var = state | evidence) by variable elimination over the ancestors
// of the query and evidence. Throws on zero-probability evidence.
double bn_posterior(const BayesNet& net, std::size_t var, std::size_t state, const BnEvidence& evidence);

enum class ImportMode { Tabular, Tree };

// Tabular: one clause per CPT row. Tree: clauses read off an exact decision
// tree per CPT.
Program to_program(const BayesNet& net, ImportMode mode);
Program import_bif(std::string_view text, ImportMode mode);

struct TreeBnPair {
  BayesNet net;
  Program tree;
  Program table;
};

// Random binary network whose CPTs come from random decision trees, so the
// tree program is genuinely smaller than the table. n_nodes <= 64.
TreeBnPair random_tree_bn(std::size_t n_nodes, std::size_t max_parents, double density,
                          std::uint64_t seed);

}  // namespace dcsharp

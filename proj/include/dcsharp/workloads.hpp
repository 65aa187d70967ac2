#pragma once

#include <cstddef>
#include <cstdint>
#include <string>

#include "dcsharp/bn_import.hpp"
#include "dcsharp/parser.hpp"

namespace dcsharp {

// Clients, accounts and loans with n constants each: 3n^2 + 6n RVs. Meant
// for the noisy-or combining rule.
std::string bank_program(std::size_t n);

// Evidence on every RV except debt(c1): has_loan and high_savings false,
// everything else true.
Evidence bank_debt_evidence(std::size_t n);
std::string bank_debt_query();

// A random tree/table network pair with a query and evidence drawn from a
// forward sample, plus the exact posterior.
struct BnTask {
  TreeBnPair pair;
  std::string query;
  Evidence evidence;
  double exact = 0.0;
};

BnTask random_bn_task(std::size_t n_nodes, std::uint64_t seed);

}  // namespace dcsharp

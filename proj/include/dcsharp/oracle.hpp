#pragma once

#include <cstdint>
#include <utility>
#include <vector>

#include "dcsharp/analysis.hpp"
#include "dcsharp/parser.hpp"
#include "dcsharp/simulation.hpp"

namespace dcsharp {

// Values of a set of ground RVs; must be closed under parents.
using ClosedAssignment = std::vector<std::pair<Term, Term>>;

// Ground instances of the program's clauses for the RVs in u, with value
// variables replaced by the values u assigns. Clause-major order.
std::vector<DistributionalClause> ground_program(const Model& model, const ClosedAssignment& u);

// Log probability (density for continuous RVs) of a closed assignment.
double assignment_probability(const Model& model, const ClosedAssignment& u);

struct ExactOptions {
  std::uint64_t budget = std::uint64_t{1} << 24;
};

// P(query | evidence) by enumerating the worlds of the query and evidence
// RVs and their ancestors. Discrete programs only.
double exact_query(const Model& model, const std::vector<BodyLiteral>& query, const Evidence& ev,
                   ExactOptions opt = {});

// Calls f for every full world of a discrete program with its probability.
void enumerate_worlds(const Model& model, FunctionRef<void(const std::vector<Term>&, double)> f,
                      ExactOptions opt = {});

}  // namespace dcsharp

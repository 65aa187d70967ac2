#pragma once

#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "dcsharp/term.hpp"

namespace dcsharp {

enum class CompareOp { Eq, Lt, Gt, Ge, Le };
enum class AggregateKind { Avg, Mode, Max, Min, Sum, Cnt };
enum class CombiningRule { Mean, NoisyOr };

const char* compare_op_text(CompareOp op);
const char* aggregate_name(AggregateKind k);

struct ValueAtom {
  Term rv;
  Term value;
  bool positive = true;
};

struct Comparison {
  Term lhs;
  Term rhs;
  CompareOp op = CompareOp::Eq;
};

struct BodyLiteral;

struct Aggregate {
  AggregateKind kind = AggregateKind::Cnt;
  Term templ;
  std::vector<BodyLiteral> goal;
  Term result;
  bool positive = true;
};

// linear([X1..Xk],[w1..wk,b],M): M = sum(wi*Xi) + b
struct StatModel {
  std::vector<Term> inputs;
  std::vector<double> params;
  Term output;
};

struct BodyLiteral {
  std::variant<ValueAtom, Comparison, Aggregate, StatModel> v;

  const ValueAtom* value_atom() const { return std::get_if<ValueAtom>(&v); }
  const Comparison* comparison() const { return std::get_if<Comparison>(&v); }
  const Aggregate* aggregate() const { return std::get_if<Aggregate>(&v); }
  const StatModel* stat_model() const { return std::get_if<StatModel>(&v); }
};

struct DistributionExpr {
  enum class Kind { Val, Bernoulli, Discrete, Gaussian };
  Kind kind = Kind::Val;
  // val: [value]; bernoulli: [p]; gaussian: [mean, variance]
  std::vector<Term> params;
  // discrete: (probability, value)
  std::vector<std::pair<Term, Term>> entries;
};

struct DistributionalClause {
  Term head;
  DistributionExpr dist;
  std::vector<BodyLiteral> body;
  int line = 0;
};

struct Program {
  std::vector<DistributionalClause> clauses;
  CombiningRule combining = CombiningRule::Mean;
};

std::string to_string(const BodyLiteral& lit);
std::string to_string(const std::vector<BodyLiteral>& body);
std::string to_string(const DistributionExpr& d);
std::string to_string(const DistributionalClause& c);
std::string to_string(const Program& p);

// Structural equality (source lines ignored).
bool operator==(const BodyLiteral& a, const BodyLiteral& b);
bool operator==(const DistributionExpr& a, const DistributionExpr& b);
bool operator==(const DistributionalClause& a, const DistributionalClause& b);

// Applies fn to every term position of the clause.
DistributionalClause map_terms(const DistributionalClause& c, const std::function<Term(const Term&)>& fn);
std::vector<BodyLiteral> map_terms(const std::vector<BodyLiteral>& body,
                                   const std::function<Term(const Term&)>& fn);

DistributionalClause apply(const DistributionalClause& c, const Substitution& s);
DistributionalClause rename_apart(const DistributionalClause& c, std::uint32_t fresh_index);

// Variables in order of first occurrence.
std::vector<Term> clause_variables(const DistributionalClause& c);
void literal_variables(const BodyLiteral& lit, std::vector<Term>& out);
void dist_variables(const DistributionExpr& d, std::vector<Term>& out);

}  // namespace dcsharp

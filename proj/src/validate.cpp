#include "dcsharp/validate.hpp"

#include <algorithm>
#include <cmath>

namespace dcsharp {

namespace {

using VarSet = std::vector<Term>;

bool contains(const VarSet& s, const Term& v) { return std::find(s.begin(), s.end(), v) != s.end(); }

void add_vars(const Term& t, VarSet& s) { collect_variables(t, s); }

void collect_rv_terms(const std::vector<BodyLiteral>& body, std::vector<Term>& rv_terms,
                      std::vector<Term>& value_terms) {
  for (const auto& lit : body) {
    if (auto v = lit.value_atom()) {
      rv_terms.push_back(v->rv);
      value_terms.push_back(v->value);
    } else if (auto a = lit.aggregate()) {
      collect_rv_terms(a->goal, rv_terms, value_terms);
    }
  }
}

bool nested_variable_compound(const Term& rv) {
  if (!rv.is_compound()) return false;
  for (const auto& a : rv.args())
    if (a.is_compound() && !a.is_ground()) return true;
  return false;
}

class ClauseChecker {
 public:
  ClauseChecker(std::size_t index, const DistributionalClause& c, std::vector<Diagnostic>& out)
      : index_(index), c_(c), out_(out) {}

  void run() {
    if (c_.head.is_var() || c_.head.is_number()) report(rules::kRvTerm, "head must be an RV term");
    check_value_variables();
    check_finite();
    VarSet bound, rv_bound;
    add_vars(c_.head, bound);
    add_vars(c_.head, rv_bound);
    body(c_.body, bound, rv_bound);
    check_range_restriction();
    check_distribution(bound);
  }

 private:
  void report(const char* rule, const std::string& msg) {
    out_.push_back({index_, rule, "clause " + std::to_string(index_ + 1) + " (line " +
                                      std::to_string(c_.line) + "): " + msg});
  }

  void check_value_variables() {
    std::vector<Term> rv_terms{c_.head}, value_terms;
    collect_rv_terms(c_.body, rv_terms, value_terms);
    VarSet rv_vars;
    for (const auto& t : rv_terms) add_vars(t, rv_vars);
    for (const auto& v : value_terms)
      if (v.is_var() && contains(rv_vars, v))
        report(rules::kValueVariableInRvTerm,
               "value variable " + v.to_string() + " also occurs in an RV term");
  }

  void check_finite() {
    std::vector<Term> rv_terms{c_.head}, value_terms;
    collect_rv_terms(c_.body, rv_terms, value_terms);
    for (const auto& t : rv_terms)
      if (nested_variable_compound(t))
        report(rules::kInfiniteHerbrandBase,
               "RV term " + t.to_string() + " nests a compound term over variables");
  }

  void check_range_restriction() {
    VarSet body_rv;
    for (const auto& lit : c_.body)
      if (auto v = lit.value_atom(); v && v->positive) add_vars(v->rv, body_rv);
    VarSet head;
    add_vars(c_.head, head);
    for (const auto& v : head)
      if (!contains(body_rv, v))
        report(rules::kHeadNotRangeRestricted,
               "head variable " + v.to_string() + " does not occur in a positive body RV term");
  }

  void check_distribution(const VarSet& bound) {
    VarSet dv;
    dist_variables(c_.dist, dv);
    for (const auto& v : dv)
      if (!contains(bound, v))
        report(rules::kUnboundDistributionVariable,
               "variable " + v.to_string() + " in the distribution is not bound");
    const auto& d = c_.dist;
    auto num = [](const Term& t) { return t.is_number(); };
    switch (d.kind) {
      case DistributionExpr::Kind::Val:
        if (d.params.at(0).is_compound() && !d.params.at(0).is_ground())
          report(rules::kInvalidDistribution, "val argument must be a constant or variable");
        break;
      case DistributionExpr::Kind::Bernoulli:
        if (num(d.params[0]) && (d.params[0].number() < 0 || d.params[0].number() > 1))
          report(rules::kInvalidDistribution, "bernoulli parameter outside [0,1]");
        break;
      case DistributionExpr::Kind::Gaussian:
        if (num(d.params[1]) && !(d.params[1].number() > 0))
          report(rules::kInvalidDistribution, "gaussian variance must be positive");
        break;
      case DistributionExpr::Kind::Discrete: {
        double sum = 0;
        bool all_num = true;
        for (const auto& [p, v] : d.entries) {
          if (!num(p)) {
            all_num = false;
            continue;
          }
          if (p.number() < 0) report(rules::kInvalidDistribution, "negative discrete probability");
          sum += p.number();
        }
        if (all_num && std::abs(sum - 1.0) > 1e-9)
          report(rules::kInvalidDistribution, "discrete probabilities sum to " + std::to_string(sum));
        break;
      }
    }
  }

  void require_bound(const Term& t, const VarSet& bound, const char* rule, const char* what) {
    VarSet vs;
    add_vars(t, vs);
    for (const auto& v : vs)
      if (!contains(bound, v)) report(rule, std::string(what) + " uses unbound variable " + v.to_string());
  }

  // bound: all variables bound so far; rv_bound: variables of positive RV
  // terms so far (the safe-negation scope).
  void body(const std::vector<BodyLiteral>& lits, VarSet& bound, VarSet& rv_bound) {
    for (const auto& lit : lits) {
      if (auto v = lit.value_atom()) {
        if (v->rv.is_var() || v->rv.is_number())
          report(rules::kRvTerm, "value atom needs an RV term, got " + v->rv.to_string());
        if (v->positive) {
          add_vars(v->rv, bound);
          add_vars(v->rv, rv_bound);
          add_vars(v->value, bound);
        } else {
          VarSet vs;
          add_vars(v->rv, vs);
          for (const auto& x : vs)
            if (!contains(rv_bound, x))
              report(rules::kUnsafeNegation, "variable " + x.to_string() + " of negated " +
                                                 v->rv.to_string() +
                                                 " is not bound by an earlier positive RV term");
        }
      } else if (auto cmp = lit.comparison()) {
        for (const Term* t : {&cmp->lhs, &cmp->rhs}) {
          if (t->is_compound()) {
            report(rules::kComparisonOperand, "operand " + t->to_string() + " is not a variable or constant");
            continue;
          }
          require_bound(*t, bound, rules::kUnboundComparison, "comparison");
        }
      } else if (auto a = lit.aggregate()) {
        VarSet inner_bound = bound, inner_rv = rv_bound;
        body(a->goal, inner_bound, inner_rv);
        require_bound(a->templ, inner_bound, rules::kUnboundComparison, "aggregate template");
        if (a->positive) {
          add_vars(a->result, bound);
        } else if (a->result.is_var()) {
          std::size_t uses = count_occurrences(a->result);
          if (uses > 1)
            report(rules::kNegatedAggregateResult,
                   "result " + a->result.to_string() + " of a negated aggregate occurs elsewhere");
        }
      } else if (auto m = lit.stat_model()) {
        for (const auto& in : m->inputs) {
          if (in.is_compound() || in.is_atom()) {
            report(rules::kStatModelOperand, "linear input " + in.to_string() + " must be numeric");
            continue;
          }
          require_bound(in, bound, rules::kStatModelOperand, "linear input");
        }
        if (m->output.is_compound())
          report(rules::kStatModelOperand, "linear output must be a variable");
        add_vars(m->output, bound);
      }
    }
  }

  std::size_t count_occurrences(const Term& var) {
    std::size_t n = 0;
    std::function<void(const Term&)> walk = [&](const Term& t) {
      if (t.is_ground()) return;
      if (t.is_var()) {
        n += t == var;
        return;
      }
      for (const auto& a : t.args()) walk(a);
    };
    map_terms(c_, [&](const Term& t) {
      walk(t);
      return t;
    });
    return n;
  }

  std::size_t index_;
  const DistributionalClause& c_;
  std::vector<Diagnostic>& out_;
};

}  // namespace

std::vector<Diagnostic> validate(const Program& p) {
  std::vector<Diagnostic> out;
  for (std::size_t i = 0; i < p.clauses.size(); ++i) ClauseChecker(i, p.clauses[i], out).run();
  return out;
}

std::string to_string(const Diagnostic& d) { return d.rule + ": " + d.message; }

}  // namespace dcsharp

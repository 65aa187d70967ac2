#include "dcsharp/syntax.hpp"

#include <charconv>

namespace dcsharp {

const char* compare_op_text(CompareOp op) {
  switch (op) {
    case CompareOp::Eq: return "==";
    case CompareOp::Lt: return "<";
    case CompareOp::Gt: return ">";
    case CompareOp::Ge: return ">=";
    case CompareOp::Le: return "=<";
  }
  return "?";
}

const char* aggregate_name(AggregateKind k) {
  switch (k) {
    case AggregateKind::Avg: return "avg";
    case AggregateKind::Mode: return "mode";
    case AggregateKind::Max: return "max";
    case AggregateKind::Min: return "min";
    case AggregateKind::Sum: return "sum";
    case AggregateKind::Cnt: return "cnt";
  }
  return "?";
}

namespace {

std::string real_text(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string to_string(const BodyLiteral& lit) {
  return std::visit(
      [](const auto& l) -> std::string {
        using T = std::decay_t<decltype(l)>;
        if constexpr (std::is_same_v<T, ValueAtom>) {
          return std::string(l.positive ? "" : "\\+ ") + l.rv.to_string() + " ~= " +
                 l.value.to_string();
        } else if constexpr (std::is_same_v<T, Comparison>) {
          return l.lhs.to_string() + " " + compare_op_text(l.op) + " " + l.rhs.to_string();
        } else if constexpr (std::is_same_v<T, Aggregate>) {
          return std::string(l.positive ? "" : "\\+ ") + aggregate_name(l.kind) + "(" +
                 l.templ.to_string() + ", (" + to_string(l.goal) + "), " + l.result.to_string() +
                 ")";
        } else {
          std::string s = "linear([";
          for (std::size_t i = 0; i < l.inputs.size(); ++i)
            s += (i ? "," : "") + l.inputs[i].to_string();
          s += "],[";
          for (std::size_t i = 0; i < l.params.size(); ++i)
            s += (i ? "," : "") + real_text(l.params[i]);
          return s + "]," + l.output.to_string() + ")";
        }
      },
      lit.v);
}

std::string to_string(const std::vector<BodyLiteral>& body) {
  std::string s;
  for (std::size_t i = 0; i < body.size(); ++i) {
    if (i) s += ", ";
    s += to_string(body[i]);
  }
  return s;
}

std::string to_string(const DistributionExpr& d) {
  switch (d.kind) {
    case DistributionExpr::Kind::Val:
      return "val(" + d.params.at(0).to_string() + ")";
    case DistributionExpr::Kind::Bernoulli:
      return "bernoulli(" + d.params.at(0).to_string() + ")";
    case DistributionExpr::Kind::Gaussian:
      return "gaussian(" + d.params.at(0).to_string() + "," + d.params.at(1).to_string() + ")";
    case DistributionExpr::Kind::Discrete: {
      std::string s = "discrete([";
      for (std::size_t i = 0; i < d.entries.size(); ++i) {
        if (i) s += ",";
        s += d.entries[i].first.to_string() + ":" + d.entries[i].second.to_string();
      }
      return s + "])";
    }
  }
  return "?";
}

std::string to_string(const DistributionalClause& c) {
  std::string s = c.head.to_string() + " ~ " + to_string(c.dist);
  if (!c.body.empty()) s += " <- " + to_string(c.body);
  return s + ".";
}

std::string to_string(const Program& p) {
  std::string s;
  for (const auto& c : p.clauses) s += to_string(c) + "\n";
  return s;
}

bool operator==(const BodyLiteral& a, const BodyLiteral& b) {
  if (a.v.index() != b.v.index()) return false;
  if (auto x = a.value_atom()) {
    auto y = b.value_atom();
    return x->rv == y->rv && x->value == y->value && x->positive == y->positive;
  }
  if (auto x = a.comparison()) {
    auto y = b.comparison();
    return x->lhs == y->lhs && x->rhs == y->rhs && x->op == y->op;
  }
  if (auto x = a.aggregate()) {
    auto y = b.aggregate();
    return x->kind == y->kind && x->templ == y->templ && x->goal == y->goal &&
           x->result == y->result && x->positive == y->positive;
  }
  auto x = a.stat_model();
  auto y = b.stat_model();
  return x->inputs == y->inputs && x->params == y->params && x->output == y->output;
}

bool operator==(const DistributionExpr& a, const DistributionExpr& b) {
  return a.kind == b.kind && a.params == b.params && a.entries == b.entries;
}

bool operator==(const DistributionalClause& a, const DistributionalClause& b) {
  return a.head == b.head && a.dist == b.dist && a.body == b.body;
}

std::vector<BodyLiteral> map_terms(const std::vector<BodyLiteral>& body,
                                   const std::function<Term(const Term&)>& fn) {
  std::vector<BodyLiteral> out;
  out.reserve(body.size());
  for (const auto& lit : body) {
    if (auto x = lit.value_atom()) {
      out.push_back({ValueAtom{fn(x->rv), fn(x->value), x->positive}});
    } else if (auto x = lit.comparison()) {
      out.push_back({Comparison{fn(x->lhs), fn(x->rhs), x->op}});
    } else if (auto x = lit.aggregate()) {
      out.push_back({Aggregate{x->kind, fn(x->templ), map_terms(x->goal, fn), fn(x->result),
                               x->positive}});
    } else {
      auto m = *lit.stat_model();
      for (auto& t : m.inputs) t = fn(t);
      m.output = fn(m.output);
      out.push_back({m});
    }
  }
  return out;
}

DistributionalClause map_terms(const DistributionalClause& c,
                               const std::function<Term(const Term&)>& fn) {
  DistributionalClause out;
  out.head = fn(c.head);
  out.dist = c.dist;
  for (auto& t : out.dist.params) t = fn(t);
  for (auto& e : out.dist.entries) e = {fn(e.first), fn(e.second)};
  out.body = map_terms(c.body, fn);
  out.line = c.line;
  return out;
}

DistributionalClause apply(const DistributionalClause& c, const Substitution& s) {
  return map_terms(c, [&](const Term& t) { return apply(t, s); });
}

DistributionalClause rename_apart(const DistributionalClause& c, std::uint32_t fresh_index) {
  return map_terms(c, [&](const Term& t) { return rename_term(t, fresh_index); });
}

void literal_variables(const BodyLiteral& lit, std::vector<Term>& out) {
  if (auto x = lit.value_atom()) {
    collect_variables(x->rv, out);
    collect_variables(x->value, out);
  } else if (auto x = lit.comparison()) {
    collect_variables(x->lhs, out);
    collect_variables(x->rhs, out);
  } else if (auto x = lit.aggregate()) {
    collect_variables(x->templ, out);
    for (const auto& g : x->goal) literal_variables(g, out);
    collect_variables(x->result, out);
  } else if (auto x = lit.stat_model()) {
    for (const auto& t : x->inputs) collect_variables(t, out);
    collect_variables(x->output, out);
  }
}

void dist_variables(const DistributionExpr& d, std::vector<Term>& out) {
  for (const auto& t : d.params) collect_variables(t, out);
  for (const auto& [p, v] : d.entries) {
    collect_variables(p, out);
    collect_variables(v, out);
  }
}

std::vector<Term> clause_variables(const DistributionalClause& c) {
  std::vector<Term> out;
  collect_variables(c.head, out);
  dist_variables(c.dist, out);
  for (const auto& lit : c.body) literal_variables(lit, out);
  return out;
}

}  // namespace dcsharp

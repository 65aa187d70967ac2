#include "dcsharp/bn_import.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <random>
#include <set>

#include "dcsharp/error.hpp"
#include "dcsharp/parser.hpp"

namespace dcsharp {

std::size_t BayesNet::index_of(std::string_view name) const {
  for (std::size_t i = 0; i < variables.size(); ++i)
    if (variables[i].name == name) return i;
  throw Error("unknown variable " + std::string(name));
}

namespace {

// ---- BIF reader ----

struct Token {
  enum Kind { Word, Punct, End } kind = End;
  std::string text;
  int line = 1, col = 1;
};

class Lexer {
 public:
  explicit Lexer(std::string_view s) : s_(s) {}

  Token next() {
    skip();
    Token t;
    t.line = line_;
    t.col = col_;
    if (i_ >= s_.size()) return t;
    char c = s_[i_];
    if (c == '"') {
      advance();
      std::size_t start = i_;
      while (i_ < s_.size() && s_[i_] != '"') advance();
      if (i_ >= s_.size()) throw ParseError(t.line, t.col, {"closing quote"}, "end of input");
      t.kind = Token::Word;
      t.text = std::string(s_.substr(start, i_ - start));
      advance();
      return t;
    }
    if (word_char(c)) {
      std::size_t start = i_;
      while (i_ < s_.size() && word_char(s_[i_])) advance();
      t.kind = Token::Word;
      t.text = std::string(s_.substr(start, i_ - start));
      return t;
    }
    if (std::string_view("{}()[],;|").find(c) != std::string_view::npos) {
      advance();
      t.kind = Token::Punct;
      t.text = std::string(1, c);
      return t;
    }
    throw ParseError(t.line, t.col, {"BIF token"}, std::string(1, c));
  }

 private:
  static bool word_char(char c) {
    return std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '-' || c == '.' ||
           c == '+';
  }
  void advance() {
    if (s_[i_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }
  void skip() {
    while (i_ < s_.size()) {
      if (std::isspace(static_cast<unsigned char>(s_[i_]))) {
        advance();
      } else if (s_.substr(i_, 2) == "//") {
        while (i_ < s_.size() && s_[i_] != '\n') advance();
      } else if (s_.substr(i_, 2) == "/*") {
        advance();
        advance();
        while (i_ < s_.size() && s_.substr(i_, 2) != "*/") advance();
        if (i_ < s_.size()) {
          advance();
          advance();
        }
      } else {
        break;
      }
    }
  }

  std::string_view s_;
  std::size_t i_ = 0;
  int line_ = 1, col_ = 1;
};

class BifParser {
 public:
  explicit BifParser(std::string_view text) : lex_(text) { tok_ = lex_.next(); }

  BayesNet parse() {
    BayesNet net;
    std::vector<std::uint8_t> seen;
    while (tok_.kind != Token::End) {
      if (tok_.text == "network") {
        bump();
        if (tok_.kind == Token::Word) net.name = take_word("network name");
        skip_block();
      } else if (tok_.text == "variable") {
        bump();
        net.variables.push_back(variable());
      } else if (tok_.text == "probability") {
        probability(net, seen);
      } else {
        fail({"network", "variable", "probability"});
      }
    }
    for (std::size_t v = 0; v < net.variables.size(); ++v)
      if (v >= seen.size() || !seen[v])
        throw Error("variable " + net.variables[v].name + " has no probability block");
    return net;
  }

 private:
  [[noreturn]] void fail(std::vector<std::string> expected) {
    throw ParseError(tok_.line, tok_.col, std::move(expected),
                     tok_.kind == Token::End ? "end of input" : tok_.text);
  }
  void bump() { tok_ = lex_.next(); }
  void expect(const char* p) {
    if (tok_.text != p) fail({std::string("'") + p + "'"});
    bump();
  }
  std::string take_word(const char* what) {
    if (tok_.kind != Token::Word) fail({what});
    std::string s = tok_.text;
    bump();
    return s;
  }
  double take_number() {
    if (tok_.kind != Token::Word) fail({"number"});
    double v = 0;
    const char* b = tok_.text.data();
    const char* e = b + tok_.text.size();
    auto r = std::from_chars(b, e, v);
    if (r.ec != std::errc() || r.ptr != e) fail({"number"});
    bump();
    return v;
  }
  void skip_statement() {
    while (tok_.kind != Token::End && tok_.text != ";") bump();
    expect(";");
  }
  void skip_block() {
    expect("{");
    while (tok_.kind != Token::End && tok_.text != "}") skip_statement();
    expect("}");
  }

  BnVariable variable() {
    BnVariable v;
    v.name = take_word("variable name");
    expect("{");
    bool typed = false;
    while (tok_.text != "}") {
      if (tok_.kind == Token::End) fail({"'}'"});
      if (tok_.text == "type") {
        bump();
        if (tok_.text != "discrete") throw Error("variable " + v.name + " is not discrete");
        bump();
        expect("[");
        double n = take_number();
        expect("]");
        expect("{");
        v.states.push_back(take_word("state name"));
        while (tok_.text == ",") {
          bump();
          v.states.push_back(take_word("state name"));
        }
        expect("}");
        expect(";");
        if (static_cast<double>(v.states.size()) != n)
          throw Error("variable " + v.name + " declares " + std::to_string(static_cast<long>(n)) +
                      " states but lists " + std::to_string(v.states.size()));
        typed = true;
      } else {
        skip_statement();
      }
    }
    bump();
    if (!typed) throw Error("variable " + v.name + " has no discrete type");
    return v;
  }

  std::vector<double> numbers() {
    std::vector<double> xs{take_number()};
    while (tok_.text == ",") {
      bump();
      xs.push_back(take_number());
    }
    expect(";");
    return xs;
  }

  void probability(BayesNet& net, std::vector<std::uint8_t>& seen) {
    Token at = tok_;
    bump();
    expect("(");
    BnCpt cpt;
    cpt.child = net.index_of(take_word("variable name"));
    if (tok_.text == "|") {
      bump();
      cpt.parents.push_back(net.index_of(take_word("variable name")));
      while (tok_.text == ",") {
        bump();
        cpt.parents.push_back(net.index_of(take_word("variable name")));
      }
    }
    expect(")");
    const auto& child = net.variables[cpt.child];
    const std::size_t ns = child.states.size();
    std::size_t nconf = 1;
    for (std::size_t p : cpt.parents) nconf *= net.variables[p].states.size();
    cpt.rows.assign(nconf, {});
    std::vector<double> fallback;
    expect("{");
    while (tok_.text != "}") {
      if (tok_.kind == Token::End) fail({"'}'"});
      if (tok_.text == "table") {
        bump();
        auto xs = numbers();
        if (xs.size() != ns * nconf)
          throw ParseError(at.line, at.col, {std::to_string(ns * nconf) + " table entries"},
                           std::to_string(xs.size()));
        for (std::size_t k = 0; k < nconf; ++k) {
          cpt.rows[k].resize(ns);
          for (std::size_t s = 0; s < ns; ++s) cpt.rows[k][s] = xs[s * nconf + k];
        }
      } else if (tok_.text == "default") {
        bump();
        fallback = numbers();
      } else if (tok_.text == "(") {
        bump();
        std::size_t k = 0;
        for (std::size_t i = 0; i < cpt.parents.size(); ++i) {
          if (i) expect(",");
          const auto& pv = net.variables[cpt.parents[i]];
          std::string st = take_word("parent state");
          auto it = std::find(pv.states.begin(), pv.states.end(), st);
          if (it == pv.states.end()) throw Error("unknown state " + st + " of " + pv.name);
          k = k * pv.states.size() + static_cast<std::size_t>(it - pv.states.begin());
        }
        expect(")");
        cpt.rows[k] = numbers();
      } else if (tok_.text == "property") {
        skip_statement();
      } else {
        fail({"table", "default", "'('", "'}'"});
      }
    }
    bump();
    for (auto& row : cpt.rows) {
      if (row.empty()) row = fallback;
      if (row.size() != ns)
        throw Error("probability block for " + child.name + " at line " + std::to_string(at.line) +
                    " has a row with " + std::to_string(row.size()) + " entries, expected " +
                    std::to_string(ns));
      double sum = 0.0;
      for (double p : row) {
        if (p < 0.0) throw Error("negative probability for " + child.name);
        sum += p;
      }
      if (std::abs(sum - 1.0) > 1e-6)
        throw Error("probabilities for " + child.name + " sum to " + std::to_string(sum));
    }
    if (seen.size() < net.variables.size()) seen.resize(net.variables.size());
    if (seen[cpt.child]) throw Error("variable " + child.name + " has two probability blocks");
    seen[cpt.child] = 1;
    if (net.cpts.size() < net.variables.size()) net.cpts.resize(net.variables.size());
    net.cpts[cpt.child] = std::move(cpt);
  }

  Lexer lex_;
  Token tok_;
};

// ---- program generation ----

std::string sanitize(const std::string& s) {
  std::string out;
  for (char c : s) {
    unsigned char u = static_cast<unsigned char>(c);
    out += std::isalnum(u) ? static_cast<char>(std::tolower(u)) : '_';
  }
  if (out.empty() || !std::islower(static_cast<unsigned char>(out[0]))) out = "v_" + out;
  return out;
}

Term state_term(const std::string& s) {
  std::int64_t v = 0;
  auto r = std::from_chars(s.data(), s.data() + s.size(), v);
  if (r.ec == std::errc() && r.ptr == s.data() + s.size()) return Term::integer(v);
  return Term::atom(sanitize(s));
}

struct Names {
  std::vector<Term> rv;
  std::vector<std::vector<Term>> states;
};

Names names_of(const BayesNet& net) {
  Names n;
  std::set<std::string> used;
  for (const auto& v : net.variables) {
    Term t = Term::atom(sanitize(v.name));
    if (!used.insert(t.to_string()).second)
      throw Error("variable names collide after sanitizing: " + t.to_string());
    n.rv.push_back(t);
    std::set<std::string> su;
    n.states.emplace_back();
    for (const auto& s : v.states) {
      Term st = state_term(s);
      if (!su.insert(st.to_string()).second)
        throw Error("state names of " + v.name + " collide after sanitizing: " + st.to_string());
      n.states.back().push_back(st);
    }
  }
  return n;
}

DistributionExpr row_distribution(const std::vector<Term>& states, const std::vector<double>& row) {
  DistributionExpr d;
  if (states.size() == 2) {
    auto a = truth_value(states[0]), b = truth_value(states[1]);
    if (a && b && *a != *b) {
      d.kind = DistributionExpr::Kind::Bernoulli;
      d.params.push_back(Term::real(*a ? row[0] : row[1]));
      return d;
    }
  }
  d.kind = DistributionExpr::Kind::Discrete;
  for (std::size_t s = 0; s < states.size(); ++s) d.entries.emplace_back(Term::real(row[s]), states[s]);
  return d;
}

BodyLiteral value_literal(const Term& rv, const Term& v, bool positive = true) {
  return BodyLiteral{ValueAtom{rv, v, positive}};
}

class TreeBuilder {
 public:
  TreeBuilder(const BayesNet& net, const Names& names, const BnCpt& cpt, Program& out)
      : net_(net), names_(names), cpt_(cpt), out_(out) {
    for (std::size_t p : cpt.parents) radix_.push_back(net.variables[p].states.size());
  }

  void build() {
    std::vector<int> a(radix_.size(), -1);
    std::vector<BodyLiteral> body;
    grow(a, body);
  }

 private:
  // Rows of configurations consistent with a, in configuration order.
  std::vector<const std::vector<double>*> rows(const std::vector<int>& a) const {
    std::vector<const std::vector<double>*> out;
    std::vector<std::size_t> digit(radix_.size(), 0);
    for (std::size_t k = 0; k < cpt_.rows.size(); ++k) {
      bool ok = true;
      for (std::size_t i = 0; i < radix_.size(); ++i)
        if (a[i] >= 0 && digit[i] != static_cast<std::size_t>(a[i])) ok = false;
      if (ok) out.push_back(&cpt_.rows[k]);
      for (std::size_t i = radix_.size(); i-- > 0;) {
        if (++digit[i] < radix_[i]) break;
        digit[i] = 0;
      }
    }
    return out;
  }

  static bool uniform(const std::vector<const std::vector<double>*>& rs) {
    for (const auto* r : rs)
      if (*r != *rs.front()) return false;
    return true;
  }

  static bool same(const std::vector<const std::vector<double>*>& x,
                   const std::vector<const std::vector<double>*>& y) {
    for (std::size_t i = 0; i < x.size(); ++i)
      if (*x[i] != *y[i]) return false;
    return true;
  }

  void grow(std::vector<int>& a, std::vector<BodyLiteral>& body) {
    auto here = rows(a);
    if (uniform(here)) {
      DistributionalClause c;
      c.head = names_.rv[cpt_.child];
      c.dist = row_distribution(names_.states[cpt_.child], *here.front());
      c.body = body;
      out_.clauses.push_back(std::move(c));
      return;
    }
    // Split on the parent that closes the most branches; ties by name.
    int best = -1;
    std::size_t best_score = 0;
    std::vector<std::vector<const std::vector<double>*>> best_branches;
    for (std::size_t i = 0; i < radix_.size(); ++i) {
      if (a[i] >= 0) continue;
      std::vector<std::vector<const std::vector<double>*>> branches;
      std::size_t score = 0;
      for (std::size_t v = 0; v < radix_[i]; ++v) {
        a[i] = static_cast<int>(v);
        branches.push_back(rows(a));
        score += uniform(branches.back());
      }
      a[i] = -1;
      bool relevant = false;
      for (std::size_t v = 1; v < branches.size(); ++v) relevant |= !same(branches[0], branches[v]);
      if (!relevant) continue;
      const std::string& name = net_.variables[cpt_.parents[i]].name;
      if (best < 0 || score > best_score ||
          (score == best_score && name < net_.variables[cpt_.parents[static_cast<std::size_t>(best)]].name)) {
        best = static_cast<int>(i);
        best_score = score;
        best_branches = std::move(branches);
      }
    }
    if (best < 0) throw Error("internal: no relevant parent in a non-uniform context");
    const std::size_t i = static_cast<std::size_t>(best);
    const Term& rv = names_.rv[cpt_.parents[i]];
    const auto& states = names_.states[cpt_.parents[i]];
    // When every value but one leads to the same subtree, those values
    // collapse into a single negated test.
    std::vector<std::size_t> odd;
    for (std::size_t v = 0; v < radix_[i]; ++v) {
      std::size_t matches = 0;
      for (std::size_t u = 0; u < radix_[i]; ++u)
        if (u != v && same(best_branches[v], best_branches[u])) ++matches;
      if (matches + 2 < radix_[i]) odd.push_back(v);
    }
    if (radix_[i] > 2 && odd.size() == 1) {
      std::size_t u = odd.front();
      std::size_t rep = u == 0 ? 1 : 0;
      a[i] = static_cast<int>(u);
      body.push_back(value_literal(rv, states[u]));
      grow(a, body);
      body.back() = value_literal(rv, states[u], false);
      a[i] = static_cast<int>(rep);
      grow(a, body);
      body.pop_back();
      a[i] = -1;
      return;
    }
    for (std::size_t v = 0; v < radix_[i]; ++v) {
      a[i] = static_cast<int>(v);
      body.push_back(value_literal(rv, states[v]));
      grow(a, body);
      body.pop_back();
    }
    a[i] = -1;
  }

  const BayesNet& net_;
  const Names& names_;
  const BnCpt& cpt_;
  Program& out_;
  std::vector<std::size_t> radix_;
};

std::vector<std::size_t> topo_order(const BayesNet& net) {
  const std::size_t n = net.variables.size();
  std::vector<std::size_t> indeg(n, 0), order;
  std::vector<std::vector<std::size_t>> kids(n);
  for (std::size_t v = 0; v < n; ++v)
    for (std::size_t p : net.cpts[v].parents) {
      kids[p].push_back(v);
      ++indeg[v];
    }
  // Lowest index first among ready variables keeps declaration order.
  std::set<std::size_t> ready;
  for (std::size_t v = 0; v < n; ++v)
    if (!indeg[v]) ready.insert(v);
  while (!ready.empty()) {
    std::size_t v = *ready.begin();
    ready.erase(ready.begin());
    order.push_back(v);
    for (std::size_t k : kids[v])
      if (--indeg[k] == 0) ready.insert(k);
  }
  if (order.size() != n) throw Error("network has a directed cycle");
  return order;
}

}  // namespace

BayesNet parse_bif(std::string_view text) { return BifParser(text).parse(); }

std::string to_bif(const BayesNet& net) {
  auto num = [](double x) {
    char buf[64];
    auto r = std::to_chars(buf, buf + sizeof buf, x);
    return std::string(buf, r.ptr);
  };
  std::string s = "network " + (net.name.empty() ? std::string("unknown") : net.name) + " {\n}\n";
  for (const auto& v : net.variables) {
    s += "variable " + v.name + " {\n  type discrete [ " + std::to_string(v.states.size()) + " ] { ";
    for (std::size_t i = 0; i < v.states.size(); ++i) s += (i ? ", " : "") + v.states[i];
    s += " };\n}\n";
  }
  for (const auto& c : net.cpts) {
    s += "probability ( " + net.variables[c.child].name;
    for (std::size_t i = 0; i < c.parents.size(); ++i)
      s += (i ? ", " : " | ") + net.variables[c.parents[i]].name;
    s += " ) {\n";
    std::vector<std::size_t> digit(c.parents.size(), 0);
    for (const auto& row : c.rows) {
      s += "  ";
      if (c.parents.empty()) {
        s += "table ";
      } else {
        s += "(";
        for (std::size_t i = 0; i < c.parents.size(); ++i)
          s += (i ? ", " : "") + net.variables[c.parents[i]].states[digit[i]];
        s += ") ";
      }
      for (std::size_t k = 0; k < row.size(); ++k) s += (k ? ", " : "") + num(row[k]);
      s += ";\n";
      for (std::size_t i = c.parents.size(); i-- > 0;) {
        if (++digit[i] < net.variables[c.parents[i]].states.size()) break;
        digit[i] = 0;
      }
    }
    s += "}\n";
  }
  return s;
}

Program to_program(const BayesNet& net, ImportMode mode) {
  Names names = names_of(net);
  Program p;
  for (std::size_t v : topo_order(net)) {
    const BnCpt& cpt = net.cpts[v];
    if (mode == ImportMode::Tree) {
      TreeBuilder(net, names, cpt, p).build();
      continue;
    }
    std::vector<std::size_t> digit(cpt.parents.size(), 0);
    for (const auto& row : cpt.rows) {
      DistributionalClause c;
      c.head = names.rv[v];
      c.dist = row_distribution(names.states[v], row);
      for (std::size_t i = 0; i < cpt.parents.size(); ++i)
        c.body.push_back(value_literal(names.rv[cpt.parents[i]], names.states[cpt.parents[i]][digit[i]]));
      p.clauses.push_back(std::move(c));
      for (std::size_t i = cpt.parents.size(); i-- > 0;) {
        if (++digit[i] < net.variables[cpt.parents[i]].states.size()) break;
        digit[i] = 0;
      }
    }
  }
  return p;
}

Program import_bif(std::string_view text, ImportMode mode) { return to_program(parse_bif(text), mode); }

namespace {

// Chance that a node below the root stops splitting; high values give many
// context-specific collapses.
constexpr double kLeafProbability = 0.7;

struct RandomTree {
  // Leaf when parent < 0.
  int parent = -1;
  double p = 0.5;
  std::vector<RandomTree> kids;
};

RandomTree random_tree(std::vector<std::size_t> free, std::size_t depth, std::mt19937_64& rng) {
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  RandomTree t;
  if (free.empty() || (depth > 0 && unit(rng) < kLeafProbability)) {
    t.p = 0.05 + 0.9 * unit(rng);
    return t;
  }
  std::size_t pick = std::uniform_int_distribution<std::size_t>(0, free.size() - 1)(rng);
  t.parent = static_cast<int>(free[pick]);
  free.erase(free.begin() + static_cast<std::ptrdiff_t>(pick));
  for (int v = 0; v < 2; ++v) t.kids.push_back(random_tree(free, depth + 1, rng));
  return t;
}

double tree_p(const RandomTree& t, const std::vector<std::size_t>& digit) {
  if (t.parent < 0) return t.p;
  return tree_p(t.kids[digit[static_cast<std::size_t>(t.parent)]], digit);
}

}  // namespace

TreeBnPair random_tree_bn(std::size_t n_nodes, std::size_t max_parents, double density,
                          std::uint64_t seed) {
  if (n_nodes == 0 || n_nodes > 64) throw Error("random networks need 1 to 64 nodes");
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  TreeBnPair out;
  BayesNet& net = out.net;
  net.name = "random" + std::to_string(seed);
  for (std::size_t i = 0; i < n_nodes; ++i)
    net.variables.push_back({"x" + std::to_string(i), {"t", "f"}});
  net.cpts.resize(n_nodes);
  for (std::size_t i = 0; i < n_nodes; ++i) {
    BnCpt& c = net.cpts[i];
    c.child = i;
    std::vector<std::size_t> cand;
    for (std::size_t j = 0; j < i; ++j)
      if (unit(rng) < density) cand.push_back(j);
    std::shuffle(cand.begin(), cand.end(), rng);
    if (cand.size() > max_parents) cand.resize(max_parents);
    std::sort(cand.begin(), cand.end());
    c.parents = cand;
    std::vector<std::size_t> slots(cand.size());
    for (std::size_t k = 0; k < slots.size(); ++k) slots[k] = k;
    RandomTree t = random_tree(slots, 0, rng);
    std::vector<std::size_t> digit(cand.size(), 0);
    for (std::size_t k = 0; k < (std::size_t{1} << cand.size()); ++k) {
      double p = tree_p(t, digit);
      c.rows.push_back({p, 1.0 - p});
      for (std::size_t d = digit.size(); d-- > 0;) {
        if (++digit[d] < 2) break;
        digit[d] = 0;
      }
    }
  }
  out.tree = to_program(net, ImportMode::Tree);
  out.table = to_program(net, ImportMode::Tabular);
  return out;
}

}  // namespace dcsharp

#include "dcsharp/parser.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <optional>

namespace dcsharp {

namespace {

std::string join_expected(const std::vector<std::string>& e) {
  std::string s;
  for (std::size_t i = 0; i < e.size(); ++i) {
    if (i) s += ", ";
    s += e[i];
  }
  return s;
}

}  // namespace

ParseError::ParseError(int line, int column, std::vector<std::string> expected,
                       const std::string& found)
    : std::runtime_error("line " + std::to_string(line) + ", column " + std::to_string(column) +
                         ": expected " + join_expected(expected) + " but found " + found),
      line_(line),
      column_(column),
      expected_(std::move(expected)) {}

namespace {

enum class Tok { Ident, Var, Int, Real, Punct, End };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

std::string describe(const Token& t) {
  if (t.kind == Tok::End) return "end of input";
  return "'" + t.text + "'";
}

std::vector<Token> lex(std::string_view src) {
  static const char* puncts[] = {"~=", "<-", "\\+", "==", "=<", ">=", "~", "<", ">",
                                 "(",  ")",  "[",   "]",  ",",  ".",  ":", "-"};
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '%') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    int tl = line, tc = col;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() && (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) ++j;
      std::string word(src.substr(i, j - i));
      Tok k = (std::isupper(static_cast<unsigned char>(c)) || c == '_') ? Tok::Var : Tok::Ident;
      out.push_back({k, word, tl, tc});
      advance(j - i);
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      bool real = false;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      if (j + 1 < src.size() && src[j] == '.' && std::isdigit(static_cast<unsigned char>(src[j + 1]))) {
        real = true;
        ++j;
        while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t k = j + 1;
        if (k < src.size() && (src[k] == '+' || src[k] == '-')) ++k;
        if (k < src.size() && std::isdigit(static_cast<unsigned char>(src[k]))) {
          real = true;
          j = k;
          while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
        }
      }
      out.push_back({real ? Tok::Real : Tok::Int, std::string(src.substr(i, j - i)), tl, tc});
      advance(j - i);
      continue;
    }
    bool matched = false;
    for (const char* p : puncts) {
      std::string_view ps(p);
      if (src.substr(i, ps.size()) == ps) {
        out.push_back({Tok::Punct, std::string(ps), tl, tc});
        advance(ps.size());
        matched = true;
        break;
      }
    }
    if (!matched) throw ParseError(tl, tc, {"a token"}, "'" + std::string(1, c) + "'");
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

const std::vector<std::pair<std::string, AggregateKind>>& aggregate_names() {
  static const std::vector<std::pair<std::string, AggregateKind>> v = {
      {"avg", AggregateKind::Avg}, {"mode", AggregateKind::Mode}, {"max", AggregateKind::Max},
      {"min", AggregateKind::Min}, {"sum", AggregateKind::Sum},   {"cnt", AggregateKind::Cnt}};
  return v;
}

std::optional<AggregateKind> aggregate_kind(const std::string& name) {
  for (const auto& [n, k] : aggregate_names())
    if (n == name) return k;
  return std::nullopt;
}

class Parser {
 public:
  explicit Parser(std::string_view src) : toks_(lex(src)) {}

  Program program() {
    Program p;
    while (peek().kind != Tok::End) p.clauses.push_back(clause());
    return p;
  }

  std::vector<BodyLiteral> query() {
    auto body = this->body();
    accept(".");
    expect_end();
    return body;
  }

  Evidence evidence() {
    Evidence ev;
    while (peek().kind != Tok::End) {
      const Token& start = peek();
      Term rv = term();
      if (rv.is_var() || rv.is_number()) fail_at(start, {"a random variable term"});
      expect("~=");
      const Token& vt = peek();
      Term value = term();
      expect(".");
      if (!rv.is_ground() || !value.is_ground())
        throw ParseError(start.line, start.col, {"a ground observation"}, "variables");
      if (value.is_compound()) fail_at(vt, {"a constant value"});
      if (value.is_atom() && value.name() == "undefined")
        throw ParseError(vt.line, vt.col, {"a concrete observed value"}, "'undefined'");
      ev.push_back({rv, value});
    }
    return ev;
  }

  Term single_term() {
    Term t = term();
    expect_end();
    return t;
  }

 private:
  const Token& peek(std::size_t k = 0) const { return toks_[std::min(pos_ + k, toks_.size() - 1)]; }

  void next() {
    if (pos_ + 1 < toks_.size()) ++pos_;
    expected_.clear();
  }

  bool is_punct(const std::string& p, std::size_t k = 0) const {
    return peek(k).kind == Tok::Punct && peek(k).text == p;
  }

  bool accept(const std::string& p) {
    if (is_punct(p)) {
      next();
      return true;
    }
    note("'" + p + "'");
    return false;
  }

  void expect(const std::string& p) {
    if (!accept(p)) fail();
  }

  void expect_end() {
    if (peek().kind != Tok::End) {
      note("end of input");
      fail();
    }
  }

  void note(const std::string& e) {
    if (std::find(expected_.begin(), expected_.end(), e) == expected_.end()) expected_.push_back(e);
  }

  [[noreturn]] void fail() { throw ParseError(peek().line, peek().col, expected_, describe(peek())); }

  [[noreturn]] void fail_at(const Token& t, std::vector<std::string> expected) {
    throw ParseError(t.line, t.col, std::move(expected), describe(t));
  }

  Term variable(const std::string& name) {
    if (name == "_") return Term::variable("_" + std::to_string(++anon_));
    return Term::variable(name);
  }

  std::optional<Term> number() {
    bool neg = false;
    if (is_punct("-") && (peek(1).kind == Tok::Int || peek(1).kind == Tok::Real)) {
      neg = true;
      next();
    }
    const Token& t = peek();
    if (t.kind == Tok::Int) {
      std::int64_t v = 0;
      auto r = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
      if (r.ec != std::errc()) fail_at(t, {"an integer in range"});
      next();
      return Term::integer(neg ? -v : v);
    }
    if (t.kind == Tok::Real) {
      double v = std::stod(t.text);
      next();
      return Term::real(neg ? -v : v);
    }
    note("a number");
    return std::nullopt;
  }

  Term term() {
    const Token& t = peek();
    if (t.kind == Tok::Var) {
      std::string name = t.text;
      next();
      return variable(name);
    }
    if (auto n = number()) return *n;
    if (t.kind == Tok::Ident) {
      std::string name = t.text;
      next();
      if (!accept("(")) return Term::atom(name);
      std::vector<Term> args{term()};
      while (accept(",")) args.push_back(term());
      expect(")");
      return Term::compound(name, std::move(args));
    }
    note("a variable");
    note("a constant");
    fail();
  }

  Term param() {
    if (peek().kind == Tok::Var) return term();
    if (auto n = number()) return *n;
    note("a variable");
    fail();
  }

  DistributionExpr dist() {
    DistributionExpr d;
    const Token& t = peek();
    if (t.kind != Tok::Ident) {
      note("a distribution");
      fail();
    }
    std::string name = t.text;
    if (name == "val") {
      d.kind = DistributionExpr::Kind::Val;
      next();
      expect("(");
      d.params.push_back(term());
    } else if (name == "bernoulli") {
      d.kind = DistributionExpr::Kind::Bernoulli;
      next();
      expect("(");
      d.params.push_back(param());
    } else if (name == "gaussian") {
      d.kind = DistributionExpr::Kind::Gaussian;
      next();
      expect("(");
      d.params.push_back(param());
      expect(",");
      d.params.push_back(param());
    } else if (name == "discrete") {
      d.kind = DistributionExpr::Kind::Discrete;
      next();
      expect("(");
      expect("[");
      do {
        Term p = param();
        expect(":");
        Term v = term();
        d.entries.emplace_back(p, v);
      } while (accept(","));
      expect("]");
    } else {
      fail_at(t, {"val", "bernoulli", "discrete", "gaussian"});
    }
    expect(")");
    return d;
  }

  DistributionalClause clause() {
    DistributionalClause c;
    const Token& start = peek();
    c.line = start.line;
    c.head = term();
    if (c.head.is_var() || c.head.is_number()) fail_at(start, {"a random variable term"});
    if (accept("~")) {
      c.dist = dist();
    } else {
      c.dist.kind = DistributionExpr::Kind::Val;
      c.dist.params.push_back(Term::atom("t"));
    }
    if (accept("<-")) c.body = body();
    expect(".");
    return c;
  }

  std::vector<BodyLiteral> body() {
    std::vector<BodyLiteral> b{literal()};
    while (accept(",")) b.push_back(literal());
    return b;
  }

  BodyLiteral literal() {
    if (accept("\\+")) {
      const Token& t = peek();
      BodyLiteral lit = positive_literal();
      if (auto* va = std::get_if<ValueAtom>(&lit.v)) {
        va->positive = false;
      } else if (auto* ag = std::get_if<Aggregate>(&lit.v)) {
        ag->positive = false;
      } else {
        fail_at(t, {"a value atom or aggregate after '\\+'"});
      }
      return lit;
    }
    return positive_literal();
  }

  std::optional<CompareOp> compare_op() {
    static const std::pair<const char*, CompareOp> ops[] = {{"==", CompareOp::Eq},
                                                            {"<", CompareOp::Lt},
                                                            {">", CompareOp::Gt},
                                                            {">=", CompareOp::Ge},
                                                            {"=<", CompareOp::Le}};
    for (const auto& [text, op] : ops)
      if (accept(text)) return op;
    return std::nullopt;
  }

  BodyLiteral positive_literal() {
    const Token& t = peek();
    if (t.kind == Tok::Ident && t.text == "linear" && is_punct("(", 1) && is_punct("[", 2))
      return stat_model();
    std::size_t saved = pos_;
    bool agg = t.kind == Tok::Ident && aggregate_kind(t.text) && is_punct("(", 1);
    if (agg) {
      // An aggregate's second argument is a parenthesized goal, which no
      // term can start with.
      std::size_t depth = 0, k = 1;
      bool seen_comma = false;
      for (;; ++k) {
        const Token& u = peek(k);
        if (u.kind == Tok::End) break;
        if (u.kind == Tok::Punct && (u.text == "(" || u.text == "[")) ++depth;
        if (u.kind == Tok::Punct && (u.text == ")" || u.text == "]")) {
          if (--depth == 0) break;
        }
        if (depth == 1 && u.kind == Tok::Punct && u.text == ",") {
          seen_comma = true;
          break;
        }
      }
      if (seen_comma && is_punct("(", k + 1)) return aggregate();
    }
    pos_ = saved;
    Term lhs = term();
    if (accept("~=")) {
      const Token& vt = peek();
      Term value = term();
      if (value.is_compound()) fail_at(vt, {"a variable or constant value"});
      return {ValueAtom{lhs, value, true}};
    }
    if (auto op = compare_op()) {
      Term rhs = term();
      return {Comparison{lhs, rhs, *op}};
    }
    fail();
  }

  BodyLiteral aggregate() {
    Aggregate a;
    a.kind = *aggregate_kind(peek().text);
    next();
    expect("(");
    a.templ = term();
    expect(",");
    expect("(");
    a.goal = body();
    expect(")");
    expect(",");
    const Token& rt = peek();
    a.result = term();
    if (a.result.is_compound()) fail_at(rt, {"a variable or constant result"});
    expect(")");
    return {std::move(a)};
  }

  BodyLiteral stat_model() {
    StatModel m;
    next();
    expect("(");
    expect("[");
    if (!is_punct("]")) {
      m.inputs.push_back(term());
      while (accept(",")) m.inputs.push_back(term());
    }
    expect("]");
    expect(",");
    expect("[");
    do {
      auto n = number();
      if (!n) fail();
      m.params.push_back(n->number());
    } while (accept(","));
    expect("]");
    expect(",");
    m.output = term();
    expect(")");
    if (m.params.size() != m.inputs.size() + 1)
      throw ParseError(peek().line, peek().col,
                       {std::to_string(m.inputs.size() + 1) + " linear parameters"},
                       std::to_string(m.params.size()));
    return {std::move(m)};
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::vector<std::string> expected_;
  int anon_ = 0;
};

}  // namespace

Program parse_program(std::string_view text) { return Parser(text).program(); }

std::vector<BodyLiteral> parse_query(std::string_view text) { return Parser(text).query(); }

Evidence parse_evidence(std::string_view text) { return Parser(text).evidence(); }

Term parse_term(std::string_view text) { return Parser(text).single_term(); }

}  // namespace dcsharp

#include "dcsharp/term.hpp"

#include <algorithm>
#include <bit>
#include <charconv>
#include <cmath>
#include <deque>
#include <mutex>
#include <sstream>
#include <unordered_map>

namespace dcsharp {

namespace {

struct SymbolTable {
  std::mutex mu;
  std::unordered_map<std::string, std::uint32_t> ids;
  std::deque<std::string> names{""};
};

SymbolTable& table() {
  static SymbolTable t;
  return t;
}

std::size_t mix(std::size_t h, std::size_t v) {
  return h ^ (v + 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2));
}

}  // namespace

Symbol intern(std::string_view name) {
  auto& t = table();
  std::lock_guard lock(t.mu);
  auto it = t.ids.find(std::string(name));
  if (it != t.ids.end()) return Symbol{it->second};
  auto id = static_cast<std::uint32_t>(t.names.size());
  t.names.emplace_back(name);
  t.ids.emplace(std::string(name), id);
  return Symbol{id};
}

const std::string& symbol_name(Symbol s) {
  auto& t = table();
  std::lock_guard lock(t.mu);
  return t.names[s.id];
}

Term Term::variable(Symbol name, std::uint32_t id) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Variable;
  n->ground = false;
  n->sym = name;
  n->var_id = id;
  n->hash = mix(mix(1, name.id), id);
  return Term(std::move(n));
}

Term Term::variable(std::string_view name, std::uint32_t id) { return variable(intern(name), id); }

Term Term::atom(Symbol name) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Atom;
  n->ground = true;
  n->sym = name;
  n->hash = mix(2, name.id);
  return Term(std::move(n));
}

Term Term::atom(std::string_view name) { return atom(intern(name)); }

Term Term::integer(std::int64_t v) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Integer;
  n->ground = true;
  n->ival = v;
  n->hash = mix(3, std::hash<std::int64_t>{}(v));
  return Term(std::move(n));
}

Term Term::real(double v) {
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Real;
  n->ground = true;
  n->rval = v;
  n->hash = mix(4, std::hash<std::uint64_t>{}(std::bit_cast<std::uint64_t>(v)));
  return Term(std::move(n));
}

Term Term::compound(Symbol functor, std::vector<Term> args) {
  if (args.empty()) return atom(functor);
  auto n = std::make_shared<Node>();
  n->kind = TermKind::Compound;
  n->sym = functor;
  n->ground = true;
  std::size_t h = mix(5, functor.id);
  for (const auto& a : args) {
    n->ground = n->ground && a.is_ground();
    h = mix(h, a.hash());
  }
  n->hash = mix(h, args.size());
  n->args = std::move(args);
  return Term(std::move(n));
}

Term Term::compound(std::string_view functor, std::vector<Term> args) {
  return compound(intern(functor), std::move(args));
}

double Term::number() const {
  return kind() == TermKind::Integer ? static_cast<double>(int_value()) : real_value();
}

namespace {

bool anonymous_name(const std::string& s) {
  if (s.size() < 2 || s[0] != '_') return false;
  return std::all_of(s.begin() + 1, s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

void format_real(double v, std::string& out) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  std::string s(buf, res.ptr);
  if (std::isfinite(v) && s.find_first_of(".e") == std::string::npos) s += ".0";
  out += s;
}

void print(const Term& t, std::string& out) {
  switch (t.kind()) {
    case TermKind::Variable:
      if (t.var_id() == 0) {
        out += anonymous_name(t.name()) ? std::string("_") : t.name();
      } else {
        out += t.name();
        out += '_';
        out += std::to_string(t.var_id());
      }
      break;
    case TermKind::Atom:
      out += is_undefined(t) ? std::string("undefined") : t.name();
      break;
    case TermKind::Integer:
      out += std::to_string(t.int_value());
      break;
    case TermKind::Real:
      format_real(t.real_value(), out);
      break;
    case TermKind::Compound:
      out += t.name();
      out += '(';
      for (std::size_t i = 0; i < t.arity(); ++i) {
        if (i) out += ',';
        print(t.arg(i), out);
      }
      out += ')';
      break;
  }
}

}  // namespace

std::string Term::to_string() const {
  if (!node_) return "<unbound>";
  std::string out;
  print(*this, out);
  return out;
}

bool operator==(const Term& a, const Term& b) {
  if (a.node_ == b.node_) return true;
  if (!a.node_ || !b.node_) return false;
  if (a.node_->hash != b.node_->hash || a.kind() != b.kind()) return false;
  switch (a.kind()) {
    case TermKind::Variable:
      return a.symbol() == b.symbol() && a.var_id() == b.var_id();
    case TermKind::Atom:
      return a.symbol() == b.symbol();
    case TermKind::Integer:
      return a.int_value() == b.int_value();
    case TermKind::Real:
      return std::bit_cast<std::uint64_t>(a.real_value()) ==
             std::bit_cast<std::uint64_t>(b.real_value());
    case TermKind::Compound:
      if (a.symbol() != b.symbol() || a.arity() != b.arity()) return false;
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (a.arg(i) != b.arg(i)) return false;
      return true;
  }
  return false;
}

int compare_terms(const Term& a, const Term& b) {
  auto rank = [](const Term& t) {
    switch (t.kind()) {
      case TermKind::Variable: return 0;
      case TermKind::Integer:
      case TermKind::Real: return 1;
      case TermKind::Atom: return 2;
      case TermKind::Compound: return 3;
    }
    return 4;
  };
  int ra = rank(a), rb = rank(b);
  if (ra != rb) return ra < rb ? -1 : 1;
  switch (a.kind()) {
    case TermKind::Variable: {
      int c = a.name().compare(b.name());
      if (c) return c < 0 ? -1 : 1;
      if (a.var_id() != b.var_id()) return a.var_id() < b.var_id() ? -1 : 1;
      return 0;
    }
    case TermKind::Integer:
    case TermKind::Real: {
      double x = a.number(), y = b.number();
      if (x != y) return x < y ? -1 : 1;
      if (a.kind() != b.kind()) return a.kind() == TermKind::Real ? -1 : 1;
      return 0;
    }
    case TermKind::Atom: {
      int c = a.name().compare(b.name());
      return c == 0 ? 0 : (c < 0 ? -1 : 1);
    }
    case TermKind::Compound: {
      if (a.arity() != b.arity()) return a.arity() < b.arity() ? -1 : 1;
      int c = a.name().compare(b.name());
      if (c) return c < 0 ? -1 : 1;
      for (std::size_t i = 0; i < a.arity(); ++i)
        if (int d = compare_terms(a.arg(i), b.arg(i))) return d;
      return 0;
    }
  }
  return 0;
}

VarKey var_key(const Term& v) { return VarKey{v.symbol(), v.var_id()}; }

const Term* Substitution::find(const Term& var) const {
  auto it = map_.find(var_key(var));
  return it == map_.end() ? nullptr : &it->second.second;
}

void Substitution::bind(const Term& var, Term value) {
  map_.insert_or_assign(var_key(var), std::make_pair(var, std::move(value)));
}

std::string Substitution::to_string() const {
  std::string out = "{";
  bool first = true;
  for (const auto& [k, vv] : map_) {
    if (!first) out += ", ";
    first = false;
    out += vv.first.to_string() + "/" + vv.second.to_string();
  }
  return out + "}";
}

Term apply(const Term& t, const Substitution& s) {
  if (t.is_ground() || s.empty()) return t;
  if (t.is_var()) {
    const Term* b = s.find(t);
    return b ? *b : t;
  }
  std::vector<Term> args;
  args.reserve(t.arity());
  bool changed = false;
  for (const auto& a : t.args()) {
    args.push_back(apply(a, s));
    changed = changed || args.back().identity() != a.identity();
  }
  return changed ? Term::compound(t.symbol(), std::move(args)) : t;
}

Substitution compose(const Substitution& theta, const Substitution& sigma) {
  Substitution out;
  for (const auto& [k, vv] : theta.bindings()) {
    Term v = apply(vv.second, sigma);
    if (!(v.is_var() && var_key(v) == k)) out.bind(vv.first, v);
  }
  for (const auto& [k, vv] : sigma.bindings())
    if (!theta.find(vv.first)) out.bind(vv.first, vv.second);
  return out;
}

bool occurs(const Term& var, const Term& t) {
  if (t.is_ground()) return false;
  if (t.is_var()) return var_key(t) == var_key(var);
  for (const auto& a : t.args())
    if (occurs(var, a)) return true;
  return false;
}

void collect_variables(const Term& t, std::vector<Term>& out) {
  if (t.is_ground()) return;
  if (t.is_var()) {
    if (std::find(out.begin(), out.end(), t) == out.end()) out.push_back(t);
    return;
  }
  for (const auto& a : t.args()) collect_variables(a, out);
}

namespace {

Term walk(Term t, const Substitution& s) {
  while (t.is_var()) {
    const Term* b = s.find(t);
    if (!b) break;
    t = *b;
  }
  return t;
}

bool unify_into(const Term& a0, const Term& b0, Substitution& s) {
  Term a = walk(a0, s), b = walk(b0, s);
  if (a == b) return true;
  if (a.is_var() || b.is_var()) {
    const Term& v = a.is_var() ? a : b;
    const Term& t = a.is_var() ? b : a;
    if (occurs(v, apply(t, s))) return false;
    s.bind(v, t);
    return true;
  }
  if (!a.is_compound() || !b.is_compound()) return false;
  if (a.symbol() != b.symbol() || a.arity() != b.arity()) return false;
  for (std::size_t i = 0; i < a.arity(); ++i)
    if (!unify_into(a.arg(i), b.arg(i), s)) return false;
  return true;
}

}  // namespace

std::optional<Substitution> unify(const Term& a, const Term& b) {
  Substitution tri;
  if (!unify_into(a, b, tri)) return std::nullopt;
  // Resolve triangular form into an idempotent substitution.
  Substitution out;
  for (const auto& [k, vv] : tri.bindings()) {
    Term v = vv.second;
    for (Term prev; prev.identity() != v.identity();) {
      prev = v;
      v = apply(v, tri);
    }
    out.bind(vv.first, v);
  }
  return out;
}

namespace {

bool match_into(const Term& p, const Term& t, Substitution& s) {
  if (p.is_var()) {
    if (const Term* b = s.find(p)) return *b == t;
    s.bind(p, t);
    return true;
  }
  if (p.is_ground()) return p == t;
  if (!t.is_compound() || p.symbol() != t.symbol() || p.arity() != t.arity()) return false;
  for (std::size_t i = 0; i < p.arity(); ++i)
    if (!match_into(p.arg(i), t.arg(i), s)) return false;
  return true;
}

}  // namespace

std::optional<Substitution> match(const Term& pattern, const Term& target) {
  Substitution s;
  if (!match_into(pattern, target, s)) return std::nullopt;
  return s;
}

Term rename_term(const Term& t, std::uint32_t fresh_id) {
  if (t.is_ground()) return t;
  if (t.is_var()) return Term::variable(t.symbol(), fresh_id);
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const auto& a : t.args()) args.push_back(rename_term(a, fresh_id));
  return Term::compound(t.symbol(), std::move(args));
}

bool match_slots(const Term& pattern, const Term& ground, Env& env, Trail& trail) {
  if (pattern.is_var()) {
    Term& slot = env[pattern.var_id()];
    if (slot) return slot == ground;
    slot = ground;
    trail.slots.push_back(pattern.var_id());
    return true;
  }
  if (pattern.is_ground()) return pattern == ground;
  if (!ground.is_compound() || pattern.symbol() != ground.symbol() ||
      pattern.arity() != ground.arity())
    return false;
  for (std::size_t i = 0; i < pattern.arity(); ++i)
    if (!match_slots(pattern.arg(i), ground.arg(i), env, trail)) return false;
  return true;
}

Term instantiate(const Term& pattern, const Env& env) {
  if (pattern.is_ground()) return pattern;
  if (pattern.is_var()) {
    const Term& b = env[pattern.var_id()];
    return b ? b : pattern;
  }
  std::vector<Term> args;
  args.reserve(pattern.arity());
  for (const auto& a : pattern.args()) args.push_back(instantiate(a, env));
  return Term::compound(pattern.symbol(), std::move(args));
}

bool slots_ground(const Term& pattern, const Env& env) {
  if (pattern.is_ground()) return true;
  if (pattern.is_var()) return static_cast<bool>(env[pattern.var_id()]);
  for (const auto& a : pattern.args())
    if (!slots_ground(a, env)) return false;
  return true;
}

const Term& undefined_value() {
  static const Term u = Term::atom("$undefined");
  return u;
}

bool is_undefined(const Term& v) {
  return v && v.is_atom() && v.symbol() == undefined_value().symbol();
}

std::optional<bool> truth_value(const Term& v) {
  static const Symbol t = intern("t"), tr = intern("true"), f = intern("f"), fa = intern("false");
  if (v.is_atom()) {
    if (v.symbol() == t || v.symbol() == tr) return true;
    if (v.symbol() == f || v.symbol() == fa) return false;
    return std::nullopt;
  }
  if (v.kind() == TermKind::Integer) {
    if (v.int_value() == 1) return true;
    if (v.int_value() == 0) return false;
  }
  return std::nullopt;
}

bool same_value(const Term& a, const Term& b) {
  if (a == b) return true;
  if (a.is_number() && b.is_number()) return a.number() == b.number();
  auto ta = truth_value(a);
  if (!ta) return false;
  auto tb = truth_value(b);
  return tb && *ta == *tb;
}

}  // namespace dcsharp

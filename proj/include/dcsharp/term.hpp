#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace dcsharp {

// Interned identifier. Symbols are process-global and never freed.
struct Symbol {
  std::uint32_t id = 0;
  friend bool operator==(Symbol a, Symbol b) { return a.id == b.id; }
  friend auto operator<=>(Symbol a, Symbol b) { return a.id <=> b.id; }
};

Symbol intern(std::string_view name);
const std::string& symbol_name(Symbol s);

enum class TermKind : std::uint8_t { Variable, Atom, Integer, Real, Compound };

class Term {
 public:
  Term() = default;

  static Term variable(Symbol name, std::uint32_t id = 0);
  static Term variable(std::string_view name, std::uint32_t id = 0);
  static Term atom(Symbol name);
  static Term atom(std::string_view name);
  static Term integer(std::int64_t v);
  static Term real(double v);
  static Term compound(Symbol functor, std::vector<Term> args);
  static Term compound(std::string_view functor, std::vector<Term> args);

  explicit operator bool() const { return node_ != nullptr; }

  TermKind kind() const { return node_->kind; }
  bool is_var() const { return node_->kind == TermKind::Variable; }
  bool is_atom() const { return node_->kind == TermKind::Atom; }
  bool is_number() const {
    return node_->kind == TermKind::Integer || node_->kind == TermKind::Real;
  }
  bool is_compound() const { return node_->kind == TermKind::Compound; }
  // Atom or number.
  bool is_constant() const { return !is_var() && !is_compound(); }

  // Atom name, functor, or variable name.
  Symbol symbol() const { return node_->sym; }
  const std::string& name() const { return symbol_name(node_->sym); }
  std::uint32_t var_id() const { return node_->var_id; }
  std::int64_t int_value() const { return node_->ival; }
  double real_value() const { return node_->rval; }
  // Integer or real as double.
  double number() const;

  std::span<const Term> args() const { return node_->args; }
  const Term& arg(std::size_t i) const { return node_->args[i]; }
  std::size_t arity() const { return node_->args.size(); }

  bool is_ground() const { return node_->ground; }
  std::size_t hash() const { return node_->hash; }
  const void* identity() const { return node_.get(); }

  std::string to_string() const;

  friend bool operator==(const Term& a, const Term& b);
  friend bool operator!=(const Term& a, const Term& b) { return !(a == b); }

 private:
  struct Node {
    TermKind kind;
    bool ground;
    Symbol sym;
    std::uint32_t var_id = 0;
    std::int64_t ival = 0;
    double rval = 0.0;
    std::vector<Term> args;
    std::size_t hash = 0;
  };
  explicit Term(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
  std::shared_ptr<const Node> node_;
};

struct TermHash {
  std::size_t operator()(const Term& t) const { return t.hash(); }
};

// Total order used wherever deterministic iteration is needed: variables,
// numbers (by value), atoms (by name), compounds (arity, name, args).
int compare_terms(const Term& a, const Term& b);
struct TermLess {
  bool operator()(const Term& a, const Term& b) const { return compare_terms(a, b) < 0; }
};

// Variables are keyed by (name, id); id 0 is a source variable, other ids
// come from renaming.
struct VarKey {
  Symbol name;
  std::uint32_t id = 0;
  friend auto operator<=>(const VarKey&, const VarKey&) = default;
};
VarKey var_key(const Term& v);

class Substitution {
 public:
  const Term* find(const Term& var) const;
  void bind(const Term& var, Term value);
  bool empty() const { return map_.empty(); }
  std::size_t size() const { return map_.size(); }
  const std::map<VarKey, std::pair<Term, Term>>& bindings() const { return map_; }
  std::string to_string() const;

 private:
  // key -> (variable, value)
  std::map<VarKey, std::pair<Term, Term>> map_;
};

Term apply(const Term& t, const Substitution& s);
// θσ: apply(apply(e, theta), sigma) == apply(e, compose(theta, sigma)).
Substitution compose(const Substitution& theta, const Substitution& sigma);
// Most general unifier with occurs check; result is idempotent.
std::optional<Substitution> unify(const Term& a, const Term& b);
// One-way matching: finds s with apply(pattern, s) == target, binding only
// variables of pattern.
std::optional<Substitution> match(const Term& pattern, const Term& target);
bool occurs(const Term& var, const Term& t);
void collect_variables(const Term& t, std::vector<Term>& out);

// Renames every variable of t to (name, fresh_id).
Term rename_term(const Term& t, std::uint32_t fresh_id);

// Slot environments used by the engines: compiled patterns carry variables
// whose var_id is an index into an Env.
using Env = std::vector<Term>;
struct Trail {
  std::vector<std::uint32_t> slots;
  std::size_t mark() const { return slots.size(); }
  void undo(Env& env, std::size_t to) {
    while (slots.size() > to) {
      env[slots.back()] = Term();
      slots.pop_back();
    }
  }
};
// Matches a slot pattern against a ground term, binding unbound slots.
bool match_slots(const Term& pattern, const Term& ground, Env& env, Trail& trail);
// Replaces bound slots; unbound slots stay as variables.
Term instantiate(const Term& pattern, const Env& env);
bool slots_ground(const Term& pattern, const Env& env);

// Reserved value for RVs whose Dst multiset is empty.
const Term& undefined_value();
bool is_undefined(const Term& v);

// Truth constants: t/true/1 and f/false/0.
std::optional<bool> truth_value(const Term& v);
// Value equality for value atoms and `==`: structural, numeric by value,
// and truth constants by truth value.
bool same_value(const Term& a, const Term& b);

}  // namespace dcsharp

template <>
struct std::hash<dcsharp::Term> {
  std::size_t operator()(const dcsharp::Term& t) const { return t.hash(); }
};

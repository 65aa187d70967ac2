#include "dcsharp/analysis.hpp"

#include <algorithm>
#include <functional>
#include <map>
#include <mutex>
#include <queue>
#include <set>

#include "dcsharp/error.hpp"

namespace dcsharp {

namespace {

Term rv_atom(const Term& t) { return Term::compound("rv", {t}); }

Term slotify(const Term& t, std::map<VarKey, std::uint32_t>& slots) {
  if (t.is_ground()) return t;
  if (t.is_var()) {
    auto [it, fresh] = slots.try_emplace(var_key(t), static_cast<std::uint32_t>(slots.size()));
    return Term::variable(t.symbol(), it->second);
  }
  std::vector<Term> args;
  args.reserve(t.arity());
  for (const auto& a : t.args()) args.push_back(slotify(a, slots));
  return Term::compound(t.symbol(), std::move(args));
}

// Text of the clause with variables renamed in order of first occurrence.
std::string canonical(const DefiniteClause& c) {
  std::map<VarKey, std::uint32_t> slots;
  std::function<Term(const Term&)> norm = [&](const Term& t) -> Term {
    if (t.is_ground()) return t;
    if (t.is_var()) {
      auto [it, fresh] = slots.try_emplace(var_key(t), static_cast<std::uint32_t>(slots.size()));
      return Term::variable("V", it->second + 1);
    }
    std::vector<Term> args;
    for (const auto& a : t.args()) args.push_back(norm(a));
    return Term::compound(t.symbol(), std::move(args));
  };
  std::string s = norm(c.head).to_string() + ":-";
  for (const auto& b : c.body) s += norm(b).to_string() + ",";
  return s;
}

void add_unique(DefiniteProgram& dp, std::set<std::string>& seen, DefiniteClause c) {
  if (seen.insert(canonical(c)).second) dp.clauses.push_back(std::move(c));
}

std::vector<Term> rv_body(const std::vector<BodyLiteral>& body) {
  std::vector<Term> out;
  for (const auto& lit : body)
    if (auto v = lit.value_atom()) out.push_back(rv_atom(v->rv));
  return out;
}

}  // namespace

std::string to_string(const DefiniteClause& c) {
  std::string s = c.head.to_string();
  if (!c.body.empty()) {
    s += " <- ";
    for (std::size_t i = 0; i < c.body.size(); ++i) s += (i ? ", " : "") + c.body[i].to_string();
  }
  return s + ".";
}

std::string to_string(const DefiniteProgram& p) {
  std::string s;
  for (const auto& c : p.clauses) s += to_string(c) + "\n";
  return s;
}

DefiniteProgram rv_set(const Program& p) {
  DefiniteProgram dp;
  std::set<std::string> seen;
  for (const auto& c : p.clauses) add_unique(dp, seen, {rv_atom(c.head), rv_body(c.body)});
  return dp;
}

DefiniteProgram dependency_set(const Program& p) {
  DefiniteProgram dp = rv_set(p);
  std::set<std::string> seen;
  for (const auto& c : dp.clauses) seen.insert(canonical(c));
  for (const auto& c : p.clauses) {
    if (c.body.empty()) continue;
    std::vector<Term> body = rv_body(c.body);
    std::vector<Term> full{rv_atom(c.head)};
    full.insert(full.end(), body.begin(), body.end());
    for (const auto& b : body)
      add_unique(dp, seen, {Term::compound("pa", {c.head, b.arg(0)}), full});

    std::uint32_t fresh = 0;
    for (std::size_t i = 0; i < c.body.size(); ++i) {
      const Aggregate* agg = c.body[i].aggregate();
      if (!agg) continue;
      // Variables bound outside the aggregate keep their names; the rest
      // are existential inside it and get renamed per clause.
      std::vector<Term> outside;
      collect_variables(c.head, outside);
      dist_variables(c.dist, outside);
      for (std::size_t j = 0; j < c.body.size(); ++j)
        if (j != i) literal_variables(c.body[j], outside);
      std::vector<Term> inner_rv;
      for (const auto& g : agg->goal)
        if (auto v = g.value_atom()) inner_rv.push_back(v->rv);
      for (const auto& target : inner_rv) {
        ++fresh;
        auto rename = [&](const Term& t) {
          Substitution s;
          std::vector<Term> vs;
          collect_variables(t, vs);
          for (const auto& v : vs)
            if (std::find(outside.begin(), outside.end(), v) == outside.end())
              s.bind(v, Term::variable(v.symbol(), fresh));
          return apply(t, s);
        };
        std::vector<Term> b2 = full;
        for (const auto& t : inner_rv) b2.push_back(rv_atom(rename(t)));
        add_unique(dp, seen, {Term::compound("pa", {c.head, rename(target)}), b2});
      }
    }
  }
  return dp;
}

namespace {

std::uint64_t mix64(std::uint64_t a, std::uint64_t b) {
  return a ^ (b + 0x9e3779b97f4a7c15ULL + (a << 6) + (a >> 2));
}

std::uint64_t functor_key(const Term& t) {
  return mix64(t.symbol().id, t.is_compound() ? t.arity() : 0);
}

// Keys an atom by its predicate, its first argument's functor, and that
// argument's first argument when bound.
struct AtomKeys {
  std::uint64_t k1;
  std::optional<std::uint64_t> k2;
  std::optional<std::uint64_t> k3;
};

AtomKeys atom_keys(const Term& atom, const Env* env) {
  AtomKeys k{functor_key(atom), std::nullopt, std::nullopt};
  if (!atom.is_compound()) return k;
  Term a0 = atom.arg(0);
  if (a0.is_var()) {
    if (!env || !(*env)[a0.var_id()]) return k;
    a0 = (*env)[a0.var_id()];
  }
  k.k2 = mix64(k.k1, functor_key(a0) ^ (static_cast<std::uint64_t>(a0.kind()) << 40));
  if (a0.is_compound()) {
    Term b0 = a0.arg(0);
    if (b0.is_var()) {
      if (!env || !(*env)[b0.var_id()]) return k;
      b0 = (*env)[b0.var_id()];
    }
    if (b0.is_ground()) k.k3 = mix64(*k.k2, b0.hash());
  } else if (a0.is_ground()) {
    k.k3 = mix64(*k.k2, a0.hash());
  }
  return k;
}

class FactStore {
 public:
  bool insert(const Term& fact) {
    if (index_.count(fact)) return false;
    auto id = static_cast<std::uint32_t>(facts_.size());
    index_.emplace(fact, id);
    facts_.push_back(fact);
    AtomKeys k = atom_keys(fact, nullptr);
    by1_[k.k1].push_back(id);
    if (k.k2) by2_[*k.k2].push_back(id);
    if (k.k3) by3_[*k.k3].push_back(id);
    return true;
  }

  const std::vector<std::uint32_t>* candidates(const Term& pattern, const Env& env) const {
    AtomKeys k = atom_keys(pattern, &env);
    if (k.k3) return lookup(by3_, *k.k3);
    if (k.k2) return lookup(by2_, *k.k2);
    return lookup(by1_, k.k1);
  }

  std::size_t size() const { return facts_.size(); }
  const Term& fact(std::size_t i) const { return facts_[i]; }
  std::vector<Term>& facts() { return facts_; }

 private:
  using Map = std::unordered_map<std::uint64_t, std::vector<std::uint32_t>>;
  static const std::vector<std::uint32_t>* lookup(const Map& m, std::uint64_t k) {
    auto it = m.find(k);
    return it == m.end() ? nullptr : &it->second;
  }
  std::vector<Term> facts_;
  std::unordered_map<Term, std::uint32_t, TermHash> index_;
  Map by1_, by2_, by3_;
};

struct SlotClause {
  Term head;
  std::vector<Term> body;
  std::size_t slots;
};

class SemiNaive {
 public:
  SemiNaive(const DefiniteProgram& dp, FactStore& store) : store_(store) {
    for (const auto& c : dp.clauses) {
      std::map<VarKey, std::uint32_t> slots;
      SlotClause sc;
      sc.head = slotify(c.head, slots);
      for (const auto& b : c.body) sc.body.push_back(slotify(b, slots));
      sc.slots = slots.size();
      clauses_.push_back(std::move(sc));
    }
  }

  void run() {
    for (const auto& c : clauses_)
      if (c.body.empty()) {
        if (!c.head.is_ground())
          throw Error("fact " + c.head.to_string() + " is not ground; the RV set is infinite");
        store_.insert(c.head);
      }
    std::size_t delta_begin = 0, delta_end = store_.size();
    while (delta_begin < delta_end) {
      for (const auto& c : clauses_) {
        for (std::size_t d = 0; d < c.body.size(); ++d) {
          Env env(c.slots);
          Trail trail;
          join(c, 0, d, delta_begin, delta_end, env, trail);
        }
      }
      delta_begin = delta_end;
      delta_end = store_.size();
    }
  }

 private:
  void join(const SlotClause& c, std::size_t pos, std::size_t d, std::size_t db, std::size_t de,
            Env& env, Trail& trail) {
    if (pos == c.body.size()) {
      Term h = instantiate(c.head, env);
      if (!h.is_ground())
        throw Error("head " + h.to_string() + " is not range restricted; the RV set is infinite");
      store_.insert(h);
      return;
    }
    std::size_t lo = pos == d ? db : 0;
    std::size_t hi = pos < d ? db : de;
    if (lo >= hi) return;
    const Term& atom = c.body[pos];
    const auto* cand = store_.candidates(atom, env);
    if (!cand) return;
    auto first = std::lower_bound(cand->begin(), cand->end(), lo);
    auto last = std::lower_bound(first, cand->end(), hi);
    // Indices are captured up front: the store grows during the join.
    std::vector<std::uint32_t> ids(first, last);
    for (std::uint32_t id : ids) {
      std::size_t m = trail.mark();
      if (match_slots(atom, store_.fact(id), env, trail)) join(c, pos + 1, d, db, de, env, trail);
      trail.undo(env, m);
    }
  }

  FactStore& store_;
  std::vector<SlotClause> clauses_;
};

}  // namespace

LeastModel::LeastModel(const DefiniteProgram& dp) {
  FactStore store;
  SemiNaive(dp, store).run();
  facts_ = std::move(store.facts());
  std::sort(facts_.begin(), facts_.end(), TermLess{});
  for (std::size_t i = 0; i < facts_.size(); ++i) index_.emplace(facts_[i], i);
}

bool LeastModel::entails(const Term& ground_atom) const { return index_.count(ground_atom) > 0; }

std::vector<Term> LeastModel::enumerate(const Term& pattern) const {
  std::vector<Term> out;
  for (const auto& f : facts_)
    if (match(pattern, f)) out.push_back(f);
  return out;
}

namespace {

std::shared_ptr<const LeastModel> tabled_model(const DefiniteProgram& dp) {
  static std::mutex mu;
  static std::map<std::string, std::shared_ptr<const LeastModel>> cache;
  std::string key = to_string(dp);
  std::lock_guard lock(mu);
  auto it = cache.find(key);
  if (it != cache.end()) return it->second;
  auto m = std::make_shared<const LeastModel>(dp);
  cache.emplace(key, m);
  return m;
}

}  // namespace

bool entails(const DefiniteProgram& dp, const Term& query) {
  return tabled_model(dp)->entails(query);
}

std::vector<Term> enumerate(const DefiniteProgram& dp, const Term& pattern) {
  return tabled_model(dp)->enumerate(pattern);
}

GroundDependencyDag::GroundDependencyDag(std::vector<Term> nodes,
                                         const std::vector<std::pair<Term, Term>>& edges) {
  std::vector<std::pair<std::string, Term>> named;
  for (auto& n : nodes) named.emplace_back(n.to_string(), n);
  std::sort(named.begin(), named.end(), [](const auto& a, const auto& b) { return a.first < b.first; });
  named.erase(std::unique(named.begin(), named.end(),
                          [](const auto& a, const auto& b) { return a.first == b.first; }),
              named.end());
  for (auto& [name, t] : named) {
    ids_.emplace(t, static_cast<RvId>(nodes_.size()));
    nodes_.push_back(t);
    names_.push_back(name);
  }
  std::size_t n = nodes_.size();
  parents_.assign(n, {});
  children_.assign(n, {});
  for (const auto& [p, c] : edges) {
    RvId pi = id(p), ci = id(c);
    parents_[ci].push_back(pi);
    children_[pi].push_back(ci);
  }
  for (auto* adj : {&parents_, &children_})
    for (auto& v : *adj) {
      std::sort(v.begin(), v.end());
      v.erase(std::unique(v.begin(), v.end()), v.end());
    }

  std::vector<std::size_t> indeg(n);
  for (std::size_t i = 0; i < n; ++i) indeg[i] = parents_[i].size();
  std::priority_queue<RvId, std::vector<RvId>, std::greater<>> ready;
  for (RvId i = 0; i < n; ++i)
    if (indeg[i] == 0) ready.push(i);
  rank_.assign(n, 0);
  while (!ready.empty()) {
    RvId u = ready.top();
    ready.pop();
    rank_[u] = order_.size();
    order_.push_back(u);
    for (RvId c : children_[u])
      if (--indeg[c] == 0) ready.push(c);
  }
  if (order_.size() == n) return;

  // Walk parent links among unfinished nodes until one repeats.
  RvId start = 0;
  while (indeg[start] == 0) ++start;
  std::vector<RvId> path;
  std::vector<std::size_t> pos(n, SIZE_MAX);
  RvId u = start;
  while (pos[u] == SIZE_MAX) {
    pos[u] = path.size();
    path.push_back(u);
    for (RvId p : parents_[u])
      if (indeg[p] > 0) {
        u = p;
        break;
      }
  }
  std::vector<std::string> witness;
  for (std::size_t i = path.size(); i-- > pos[u];) witness.push_back(names_[path[i]]);
  witness.push_back(names_[u]);
  throw CycleError(witness);
}

GroundDependencyDag GroundDependencyDag::from_names(
    const std::vector<std::string>& nodes,
    const std::vector<std::pair<std::string, std::string>>& edges) {
  std::vector<Term> ns;
  for (const auto& s : nodes) ns.push_back(Term::atom(s));
  std::vector<std::pair<Term, Term>> es;
  for (const auto& [p, c] : edges) es.emplace_back(Term::atom(p), Term::atom(c));
  return GroundDependencyDag(std::move(ns), es);
}

std::optional<RvId> GroundDependencyDag::find(const Term& t) const {
  auto it = ids_.find(t);
  if (it == ids_.end()) return std::nullopt;
  return it->second;
}

RvId GroundDependencyDag::id(const Term& t) const {
  auto r = find(t);
  if (!r) throw Error("unknown random variable " + t.to_string());
  return *r;
}

RvId GroundDependencyDag::id(const std::string& name) const {
  auto it = std::lower_bound(names_.begin(), names_.end(), name);
  if (it == names_.end() || *it != name) throw Error("unknown random variable " + name);
  return static_cast<RvId>(it - names_.begin());
}

std::size_t GroundDependencyDag::edge_count() const {
  std::size_t e = 0;
  for (const auto& p : parents_) e += p.size();
  return e;
}

namespace {

GroundDependencyDag build_dag(const Program& p) {
  LeastModel model(dependency_set(p));
  std::vector<Term> nodes;
  std::vector<std::pair<Term, Term>> edges;
  static const Symbol rv = intern("rv"), pa = intern("pa");
  for (const auto& f : model.facts()) {
    if (f.symbol() == rv && f.arity() == 1) nodes.push_back(f.arg(0));
    if (f.symbol() == pa && f.arity() == 2) edges.emplace_back(f.arg(1), f.arg(0));
  }
  if (nodes.empty()) throw Error(rules::kNoRvs);
  return GroundDependencyDag(std::move(nodes), edges);
}

}  // namespace

GroundDependencyDag ground_dag(const Program& p) { return build_dag(p); }

RvIndex::RvIndex(const GroundDependencyDag& dag) : dag_(&dag) {
  for (RvId id = 0; id < dag.size(); ++id) {
    const Term& t = dag.node(id);
    std::uint64_t k1 = functor_key(t);
    by_functor_[k1].push_back(id);
    if (t.is_compound()) by_first_arg_[mix64(k1, t.arg(0).hash())].push_back(id);
  }
}

std::optional<RvId> RvIndex::find(const Term& ground) const { return dag_->find(ground); }

const std::vector<RvId>* RvIndex::candidates(const Term& pattern, const Env& env) const {
  std::uint64_t k1 = functor_key(pattern);
  if (pattern.is_compound()) {
    const Term& a0 = pattern.arg(0);
    const Term* bound = nullptr;
    if (a0.is_ground()) bound = &a0;
    else if (a0.is_var() && env[a0.var_id()]) bound = &env[a0.var_id()];
    if (bound) {
      auto it = by_first_arg_.find(mix64(k1, bound->hash()));
      return it == by_first_arg_.end() ? nullptr : &it->second;
    }
  }
  auto it = by_functor_.find(k1);
  return it == by_functor_.end() ? nullptr : &it->second;
}

std::vector<BodyLiteral> compile_body(const std::vector<BodyLiteral>& body, std::size_t& slots,
                                      std::vector<Term>* names) {
  std::map<VarKey, std::uint32_t> map;
  auto out = map_terms(body, [&](const Term& t) { return slotify(t, map); });
  slots = map.size();
  if (names) {
    names->assign(slots, Term());
    for (const auto& [k, s] : map) (*names)[s] = Term::variable(k.name, k.id);
  }
  return out;
}

CompiledClause compile_clause(const DistributionalClause& c, std::size_t index) {
  std::map<VarKey, std::uint32_t> map;
  CompiledClause cc;
  cc.index = index;
  cc.clause = map_terms(c, [&](const Term& t) { return slotify(t, map); });
  cc.slots = map.size();
  std::vector<Term> dv;
  dist_variables(cc.clause.dist, dv);
  if (dv.empty()) cc.fixed_dist = make_distribution(cc.clause.dist, Env{});
  return cc;
}

Model::Model(Program p) : program_(std::move(p)), dag_(build_dag(program_)), index_(dag_) {
  for (std::size_t i = 0; i < program_.clauses.size(); ++i)
    compiled_.push_back(compile_clause(program_.clauses[i], i));
  heads_.assign(dag_.size(), {});
  for (RvId id = 0; id < dag_.size(); ++id) {
    const Term& rv = dag_.node(id);
    for (const auto& cc : compiled_) {
      const Term& h = cc.clause.head;
      if (h.symbol() != rv.symbol() || h.arity() != rv.arity() || h.kind() != rv.kind()) continue;
      Env env(cc.slots);
      Trail trail;
      if (match_slots(h, rv, env, trail))
        heads_[id].push_back({static_cast<std::uint32_t>(cc.index), std::move(env)});
    }
  }
}

namespace {

std::string predicate(const Term& t) {
  return t.name() + "/" + std::to_string(t.is_compound() ? t.arity() : 0);
}

void predicate_edges(const std::string& head, const std::vector<BodyLiteral>& body, bool in_agg,
                     std::map<std::string, std::set<std::pair<std::string, bool>>>& g) {
  for (const auto& lit : body) {
    if (auto v = lit.value_atom()) {
      if (v->rv.is_var() || v->rv.is_number()) continue;
      g[head].insert({predicate(v->rv), !v->positive || in_agg});
    } else if (auto a = lit.aggregate()) {
      predicate_edges(head, a->goal, true, g);
    }
  }
}

}  // namespace

std::vector<Diagnostic> analysis_diagnostics(const Program& p) {
  std::vector<Diagnostic> out;
  std::map<std::string, std::set<std::pair<std::string, bool>>> g;
  for (const auto& c : p.clauses) {
    if (c.head.is_var() || c.head.is_number()) continue;
    predicate_edges(predicate(c.head), c.body, false, g);
  }
  auto reaches = [&](const std::string& from, const std::string& to) {
    std::set<std::string> seen{from};
    std::vector<std::string> stack{from};
    while (!stack.empty()) {
      std::string u = stack.back();
      stack.pop_back();
      if (u == to) return true;
      for (const auto& [v, neg] : g[u])
        if (seen.insert(v).second) stack.push_back(v);
    }
    return false;
  };
  for (const auto& [u, es] : std::map(g))
    for (const auto& [v, neg] : es)
      if (neg && reaches(v, u))
        out.push_back({0, rules::kUnstratified,
                       u + " depends negatively on " + v + " within a recursive cycle"});
  try {
    build_dag(p);
  } catch (const CycleError& e) {
    out.push_back({0, rules::kCycle, e.what()});
  } catch (const Error& e) {
    out.push_back({0, std::string(e.what()) == rules::kNoRvs ? rules::kNoRvs : "analysis", e.what()});
  }
  return out;
}

}  // namespace dcsharp

#include <algorithm>
#include <iterator>

#include "dcsharp/bn_import.hpp"
#include "dcsharp/error.hpp"

namespace dcsharp {

namespace {

// Table over vars, last variable fastest.
struct Factor {
  std::vector<std::size_t> vars;
  std::vector<double> val;
};

class Eliminator {
 public:
  Eliminator(const BayesNet& net, const BnEvidence& ev) : net_(net), fixed_(net.variables.size(), -1) {
    for (auto [v, s] : ev) {
      if (v >= net.variables.size() || s >= net.variables[v].states.size()) throw Error("evidence out of range");
      if (fixed_[v] >= 0 && fixed_[v] != static_cast<long>(s)) throw Error("evidence has probability zero");
      fixed_[v] = static_cast<long>(s);
    }
  }

  std::size_t card(std::size_t v) const { return fixed_[v] >= 0 ? 1 : net_.variables[v].states.size(); }

  // CPT of v restricted to the evidence.
  Factor cpt_factor(std::size_t v) const {
    const BnCpt& c = net_.cpts[v];
    Factor f;
    f.vars = c.parents;
    f.vars.push_back(v);
    std::sort(f.vars.begin(), f.vars.end());
    auto pos = [&](std::size_t u) {
      return static_cast<std::size_t>(std::lower_bound(f.vars.begin(), f.vars.end(), u) - f.vars.begin());
    };
    std::vector<std::size_t> parent_pos;
    for (std::size_t p : c.parents) parent_pos.push_back(pos(p));
    const std::size_t child_pos = pos(v);
    walk(f.vars, [&](const std::vector<std::size_t>& digit) {
      std::size_t row = 0;
      for (std::size_t i = 0; i < c.parents.size(); ++i)
        row = row * net_.variables[c.parents[i]].states.size() + state(c.parents[i], digit[parent_pos[i]]);
      f.val.push_back(c.rows[row][state(v, digit[child_pos])]);
    });
    return f;
  }

  Factor product(const Factor& a, const Factor& b) const {
    Factor f;
    std::set_union(a.vars.begin(), a.vars.end(), b.vars.begin(), b.vars.end(), std::back_inserter(f.vars));
    const auto sa = strides(a, f.vars), sb = strides(b, f.vars);
    walk(f.vars, [&](const std::vector<std::size_t>& digit) {
      std::size_t ia = 0, ib = 0;
      for (std::size_t i = 0; i < digit.size(); ++i) {
        ia += digit[i] * sa[i];
        ib += digit[i] * sb[i];
      }
      f.val.push_back(a.val[ia] * b.val[ib]);
    });
    return f;
  }

  Factor sum_out(const Factor& a, std::size_t v) const {
    Factor f;
    for (std::size_t u : a.vars)
      if (u != v) f.vars.push_back(u);
    f.val.assign(size(f.vars), 0.0);
    const auto sf = strides(f, a.vars);
    std::size_t k = 0;
    walk(a.vars, [&](const std::vector<std::size_t>& digit) {
      std::size_t i = 0;
      for (std::size_t d = 0; d < digit.size(); ++d) i += digit[d] * sf[d];
      f.val[i] += a.val[k++];
    });
    return f;
  }

  std::size_t size(const std::vector<std::size_t>& vars) const {
    std::size_t n = 1;
    for (std::size_t v : vars) n *= card(v);
    return n;
  }

 private:
  std::size_t state(std::size_t v, std::size_t digit) const {
    return fixed_[v] >= 0 ? static_cast<std::size_t>(fixed_[v]) : digit;
  }

  // Stride of each scope variable inside f; zero when f lacks it.
  std::vector<std::size_t> strides(const Factor& f, const std::vector<std::size_t>& scope) const {
    std::vector<std::size_t> s(scope.size(), 0);
    std::size_t stride = 1;
    for (std::size_t i = f.vars.size(); i-- > 0;) {
      auto it = std::lower_bound(scope.begin(), scope.end(), f.vars[i]);
      s[static_cast<std::size_t>(it - scope.begin())] = stride;
      stride *= card(f.vars[i]);
    }
    return s;
  }

  template <class Fn>
  void walk(const std::vector<std::size_t>& vars, Fn&& fn) const {
    std::vector<std::size_t> digit(vars.size(), 0);
    for (std::size_t n = size(vars); n > 0; --n) {
      fn(digit);
      for (std::size_t i = vars.size(); i-- > 0;) {
        if (++digit[i] < card(vars[i])) break;
        digit[i] = 0;
      }
    }
  }

  const BayesNet& net_;
  std::vector<long> fixed_;
};

}  // namespace

double bn_posterior(const BayesNet& net, std::size_t var, std::size_t state, const BnEvidence& evidence) {
  const std::size_t n = net.variables.size();
  if (var >= n || state >= net.variables[var].states.size()) throw Error("query out of range");
  Eliminator el(net, evidence);

  std::vector<char> relevant(n, 0);
  std::vector<std::size_t> stack{var};
  for (auto [v, s] : evidence) stack.push_back(v);
  while (!stack.empty()) {
    std::size_t v = stack.back();
    stack.pop_back();
    if (relevant[v]) continue;
    relevant[v] = 1;
    for (std::size_t p : net.cpts[v].parents) stack.push_back(p);
  }

  std::vector<Factor> factors;
  for (std::size_t v = 0; v < n; ++v) {
    if (!relevant[v]) continue;
    factors.push_back(el.cpt_factor(v));
  }

  std::vector<std::size_t> hidden;
  for (std::size_t v = 0; v < n; ++v)
    if (relevant[v] && v != var) hidden.push_back(v);
  while (!hidden.empty()) {
    // Min-size heuristic, ties to the lowest index.
    std::size_t best = 0, best_size = 0;
    for (std::size_t h = 0; h < hidden.size(); ++h) {
      std::vector<std::size_t> scope;
      for (const auto& f : factors)
        if (std::binary_search(f.vars.begin(), f.vars.end(), hidden[h]))
          scope.insert(scope.end(), f.vars.begin(), f.vars.end());
      std::sort(scope.begin(), scope.end());
      scope.erase(std::unique(scope.begin(), scope.end()), scope.end());
      std::size_t sz = el.size(scope);
      if (h == 0 || sz < best_size) best = h, best_size = sz;
    }
    const std::size_t v = hidden[best];
    hidden.erase(hidden.begin() + static_cast<std::ptrdiff_t>(best));
    Factor joint{{}, {1.0}};
    std::vector<Factor> rest;
    for (auto& f : factors) {
      if (std::binary_search(f.vars.begin(), f.vars.end(), v))
        joint = el.product(joint, f);
      else
        rest.push_back(std::move(f));
    }
    rest.push_back(el.sum_out(joint, v));
    factors = std::move(rest);
  }

  Factor joint{{}, {1.0}};
  for (const auto& f : factors) joint = el.product(joint, f);
  double total = 0.0;
  for (double x : joint.val) total += x;
  if (!(total > 0.0)) throw Error("evidence has probability zero");
  // Observed query collapses to a single cell.
  if (el.card(var) == 1) {
    for (auto [v, s] : evidence)
      if (v == var) return s == state ? 1.0 : 0.0;
  }
  return joint.val[state] / total;
}

}  // namespace dcsharp

#include "dcsharp/distribution.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>

#include "dcsharp/error.hpp"

namespace dcsharp {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

double uniform01(Rng& rng) { return std::uniform_real_distribution<double>(0.0, 1.0)(rng); }

double safe_log(double x) { return x > 0 ? std::log(x) : kNegInf; }

std::string num(double x) { return Term::real(x).to_string(); }

}  // namespace

CycleError::CycleError(std::vector<std::string> witness)
    : Error([&] {
        std::string s = "cyclic dependency: ";
        for (std::size_t i = 0; i < witness.size(); ++i) s += (i ? " -> " : "") + witness[i];
        return s;
      }()),
      witness_(std::move(witness)) {}

Rng row_rng(std::uint64_t seed, std::uint64_t row) {
  return Rng(splitmix64(splitmix64(seed) ^ (row * 0xd1b54a32d192ed03ULL + 1)));
}

const Term& true_value() {
  static const Term t = Term::atom("t");
  return t;
}

const Term& false_value() {
  static const Term f = Term::atom("f");
  return f;
}

Distribution Distribution::val(Term v) {
  if (!v || !v.is_ground()) throw Error("val distribution needs a ground value");
  Distribution d;
  d.kind_ = Kind::Val;
  d.value_ = std::move(v);
  return d;
}

Distribution Distribution::bernoulli(double p) {
  if (!(p >= 0.0 && p <= 1.0)) throw Error("bernoulli parameter " + num(p) + " outside [0,1]");
  Distribution d;
  d.kind_ = Kind::Bernoulli;
  d.a_ = p;
  return d;
}

Distribution Distribution::discrete(std::vector<std::pair<double, Term>> entries) {
  if (entries.empty()) throw Error("discrete distribution needs at least one entry");
  double sum = 0;
  for (const auto& [p, v] : entries) {
    if (!(p >= 0.0)) throw Error("negative discrete probability");
    if (!v.is_ground()) throw Error("discrete values must be ground");
    sum += p;
  }
  if (std::abs(sum - 1.0) > 1e-9) throw Error("discrete probabilities sum to " + num(sum));
  Distribution d;
  d.kind_ = Kind::Discrete;
  d.entries_ = std::make_shared<const std::vector<std::pair<double, Term>>>(std::move(entries));
  return d;
}

Distribution Distribution::gaussian(double mean, double variance) {
  if (!(variance > 0.0)) throw Error("gaussian variance must be positive");
  Distribution d;
  d.kind_ = Kind::Gaussian;
  d.a_ = mean;
  d.b_ = variance;
  return d;
}

std::string Distribution::to_string() const {
  switch (kind_) {
    case Kind::Val: return "val(" + value_.to_string() + ")";
    case Kind::Bernoulli: return "bernoulli(" + num(a_) + ")";
    case Kind::Gaussian: return "gaussian(" + num(a_) + "," + num(b_) + ")";
    case Kind::Discrete: {
      std::string s = "discrete([";
      for (std::size_t i = 0; i < entries_->size(); ++i)
        s += (i ? "," : "") + num((*entries_)[i].first) + ":" + (*entries_)[i].second.to_string();
      return s + "])";
    }
  }
  return "?";
}

CombinedDistribution CombinedDistribution::single(Distribution d) {
  CombinedDistribution c;
  c.kind_ = Kind::Single;
  c.components_.push_back(std::move(d));
  return c;
}

CombinedDistribution CombinedDistribution::mean_mixture(std::vector<Distribution> components) {
  if (components.empty()) throw Error("mixture needs at least one component");
  CombinedDistribution c;
  c.kind_ = Kind::MeanMixture;
  c.components_ = std::move(components);
  return c;
}

CombinedDistribution CombinedDistribution::noisy_or(double p) {
  CombinedDistribution c;
  c.kind_ = Kind::NoisyOr;
  c.p_ = p;
  return c;
}

bool CombinedDistribution::continuous() const {
  return kind_ != Kind::NoisyOr && components_.front().continuous();
}

std::string CombinedDistribution::to_string() const {
  switch (kind_) {
    case Kind::Single: return components_.front().to_string();
    case Kind::NoisyOr: return "noisy_or(" + num(p_) + ")";
    case Kind::MeanMixture: {
      std::string s = "mean([";
      for (std::size_t i = 0; i < components_.size(); ++i)
        s += (i ? "," : "") + components_[i].to_string();
      return s + "])";
    }
  }
  return "?";
}

Term draw(const Distribution& d, Rng& rng) {
  switch (d.kind()) {
    case Distribution::Kind::Val:
      return d.value();
    case Distribution::Kind::Bernoulli:
      return uniform01(rng) < d.p() ? true_value() : false_value();
    case Distribution::Kind::Discrete: {
      double u = uniform01(rng), cum = 0;
      const auto& es = d.entries();
      for (const auto& [p, v] : es) {
        cum += p;
        if (u < cum) return v;
      }
      for (auto it = es.rbegin(); it != es.rend(); ++it)
        if (it->first > 0) return it->second;
      return es.back().second;
    }
    case Distribution::Kind::Gaussian: {
      // Box-Muller, one output per pair of uniforms.
      double u1 = 1.0 - uniform01(rng);
      double u2 = uniform01(rng);
      double z = std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
      return Term::real(d.mean() + std::sqrt(d.variance()) * z);
    }
  }
  throw Error("unknown distribution");
}

Term draw(const CombinedDistribution& d, Rng& rng) {
  switch (d.kind()) {
    case CombinedDistribution::Kind::Single:
      return draw(d.components().front(), rng);
    case CombinedDistribution::Kind::NoisyOr:
      return uniform01(rng) < d.p() ? true_value() : false_value();
    case CombinedDistribution::Kind::MeanMixture: {
      const auto& cs = d.components();
      auto k = static_cast<std::size_t>(uniform01(rng) * static_cast<double>(cs.size()));
      return draw(cs[std::min(k, cs.size() - 1)], rng);
    }
  }
  throw Error("unknown distribution");
}

namespace {

double bernoulli_log(double p, const Term& v) {
  auto tv = truth_value(v);
  if (!tv) return kNegInf;
  return safe_log(*tv ? p : 1.0 - p);
}

}  // namespace

double log_likelihood(const Distribution& d, const Term& v) {
  if (is_undefined(v)) throw Error("likelihood of undefined value");
  switch (d.kind()) {
    case Distribution::Kind::Val:
      return same_value(d.value(), v) ? 0.0 : kNegInf;
    case Distribution::Kind::Bernoulli:
      return bernoulli_log(d.p(), v);
    case Distribution::Kind::Discrete: {
      double mass = 0;
      for (const auto& [p, x] : d.entries())
        if (same_value(x, v)) mass += p;
      return safe_log(mass);
    }
    case Distribution::Kind::Gaussian: {
      if (!v.is_number())
        throw Error("type mismatch: " + v.to_string() + " probed against " + d.to_string());
      double z = v.number() - d.mean();
      return -0.5 * (z * z / d.variance() + std::log(2.0 * std::numbers::pi * d.variance()));
    }
  }
  throw Error("unknown distribution");
}

double log_likelihood(const CombinedDistribution& d, const Term& v) {
  switch (d.kind()) {
    case CombinedDistribution::Kind::Single:
      return log_likelihood(d.components().front(), v);
    case CombinedDistribution::Kind::NoisyOr:
      if (is_undefined(v)) throw Error("likelihood of undefined value");
      return bernoulli_log(d.p(), v);
    case CombinedDistribution::Kind::MeanMixture: {
      std::vector<double> ls;
      ls.reserve(d.components().size());
      for (const auto& c : d.components()) ls.push_back(log_likelihood(c, v));
      return log_sum_exp(ls) - std::log(static_cast<double>(ls.size()));
    }
  }
  throw Error("unknown distribution");
}

double likelihood(const Distribution& d, const Term& v) { return std::exp(log_likelihood(d, v)); }

double likelihood(const CombinedDistribution& d, const Term& v) {
  return std::exp(log_likelihood(d, v));
}

CombinedDistribution combine(CombiningRule rule, std::span<const Distribution> ds) {
  if (ds.empty()) throw Error("cannot combine an empty multiset of distributions");
  if (ds.size() == 1) return CombinedDistribution::single(ds.front());
  if (rule == CombiningRule::NoisyOr) {
    double none = 1.0;
    for (const auto& d : ds) {
      double p;
      if (d.kind() == Distribution::Kind::Bernoulli) {
        p = d.p();
      } else if (d.kind() == Distribution::Kind::Val && truth_value(d.value())) {
        p = *truth_value(d.value()) ? 1.0 : 0.0;
      } else {
        throw Error("noisy-or requires bernoulli distributions, got " + d.to_string());
      }
      none *= 1.0 - p;
    }
    return CombinedDistribution::noisy_or(1.0 - none);
  }
  bool cont = ds.front().continuous();
  for (const auto& d : ds)
    if (d.continuous() != cont) throw Error("mixtures of discrete and continuous distributions are not supported");
  return CombinedDistribution::mean_mixture(std::vector<Distribution>(ds.begin(), ds.end()));
}

namespace {

void add_mass(std::vector<std::pair<Term, double>>& out, const Term& v, double p) {
  for (auto& [x, q] : out)
    if (same_value(x, v)) {
      q += p;
      return;
    }
  out.emplace_back(v, p);
}

void add_support(std::vector<std::pair<Term, double>>& out, const Distribution& d, double w) {
  switch (d.kind()) {
    case Distribution::Kind::Val:
      add_mass(out, d.value(), w);
      break;
    case Distribution::Kind::Bernoulli:
      add_mass(out, true_value(), w * d.p());
      add_mass(out, false_value(), w * (1.0 - d.p()));
      break;
    case Distribution::Kind::Discrete:
      for (const auto& [p, v] : d.entries()) add_mass(out, v, w * p);
      break;
    case Distribution::Kind::Gaussian:
      throw Error("continuous distribution has no finite support");
  }
}

}  // namespace

std::vector<std::pair<Term, double>> support(const CombinedDistribution& d) {
  std::vector<std::pair<Term, double>> out;
  switch (d.kind()) {
    case CombinedDistribution::Kind::NoisyOr:
      add_mass(out, true_value(), d.p());
      add_mass(out, false_value(), 1.0 - d.p());
      break;
    case CombinedDistribution::Kind::Single:
      add_support(out, d.components().front(), 1.0);
      break;
    case CombinedDistribution::Kind::MeanMixture: {
      double w = 1.0 / static_cast<double>(d.components().size());
      for (const auto& c : d.components()) add_support(out, c, w);
      break;
    }
  }
  return out;
}

namespace {

double numeric_param(const Term& t, const Env& env, const char* what) {
  Term v = instantiate(t, env);
  if (!v.is_number()) throw Error(std::string(what) + " parameter " + v.to_string() + " is not a number");
  return v.number();
}

}  // namespace

Distribution make_distribution(const DistributionExpr& e, const Env& env) {
  switch (e.kind) {
    case DistributionExpr::Kind::Val: {
      Term v = instantiate(e.params[0], env);
      if (!v.is_ground()) throw Error("val argument " + v.to_string() + " is unbound");
      return Distribution::val(v);
    }
    case DistributionExpr::Kind::Bernoulli:
      return Distribution::bernoulli(numeric_param(e.params[0], env, "bernoulli"));
    case DistributionExpr::Kind::Gaussian:
      return Distribution::gaussian(numeric_param(e.params[0], env, "gaussian"),
                                    numeric_param(e.params[1], env, "gaussian"));
    case DistributionExpr::Kind::Discrete: {
      std::vector<std::pair<double, Term>> entries;
      entries.reserve(e.entries.size());
      for (const auto& [p, v] : e.entries) {
        Term value = instantiate(v, env);
        if (!value.is_ground()) throw Error("discrete value " + value.to_string() + " is unbound");
        entries.emplace_back(numeric_param(p, env, "discrete"), value);
      }
      return Distribution::discrete(std::move(entries));
    }
  }
  throw Error("unknown distribution");
}

double log_sum_exp(std::span<const double> xs) {
  double m = kNegInf;
  for (double x : xs) m = std::max(m, x);
  if (m == kNegInf) return kNegInf;
  if (m == std::numeric_limits<double>::infinity()) return m;
  double s = 0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

}  // namespace dcsharp

#pragma once

#include <memory>
#include <random>
#include <span>
#include <utility>
#include <vector>

#include "dcsharp/syntax.hpp"
#include "dcsharp/term.hpp"

namespace dcsharp {

using Rng = std::mt19937_64;

// Independent stream for one row of a run.
Rng row_rng(std::uint64_t seed, std::uint64_t row);

class Distribution {
 public:
  enum class Kind { Val, Bernoulli, Discrete, Gaussian };

  static Distribution val(Term v);
  static Distribution bernoulli(double p);
  static Distribution discrete(std::vector<std::pair<double, Term>> entries);
  static Distribution gaussian(double mean, double variance);

  Kind kind() const { return kind_; }
  bool continuous() const { return kind_ == Kind::Gaussian; }
  const Term& value() const { return value_; }
  double p() const { return a_; }
  double mean() const { return a_; }
  double variance() const { return b_; }
  const std::vector<std::pair<double, Term>>& entries() const { return *entries_; }

  std::string to_string() const;

 private:
  Kind kind_ = Kind::Val;
  Term value_;
  double a_ = 0.0;
  double b_ = 0.0;
  std::shared_ptr<const std::vector<std::pair<double, Term>>> entries_;
};

class CombinedDistribution {
 public:
  enum class Kind { Single, MeanMixture, NoisyOr };

  static CombinedDistribution single(Distribution d);
  static CombinedDistribution mean_mixture(std::vector<Distribution> components);
  static CombinedDistribution noisy_or(double p);

  Kind kind() const { return kind_; }
  const std::vector<Distribution>& components() const { return components_; }
  double p() const { return p_; }
  bool continuous() const;

  std::string to_string() const;

 private:
  Kind kind_ = Kind::Single;
  std::vector<Distribution> components_;
  double p_ = 0.0;
};

Term draw(const Distribution& d, Rng& rng);
Term draw(const CombinedDistribution& d, Rng& rng);

double log_likelihood(const Distribution& d, const Term& v);
double log_likelihood(const CombinedDistribution& d, const Term& v);
double likelihood(const Distribution& d, const Term& v);
double likelihood(const CombinedDistribution& d, const Term& v);

CombinedDistribution combine(CombiningRule rule, std::span<const Distribution> ds);

// Probability mass of every support point; discrete distributions only.
std::vector<std::pair<Term, double>> support(const CombinedDistribution& d);

// Builds a distribution from a clause's distribution term once its variables
// are bound in env.
Distribution make_distribution(const DistributionExpr& e, const Env& env);

const Term& true_value();
const Term& false_value();

double log_sum_exp(std::span<const double> xs);

}  // namespace dcsharp

#pragma once

namespace mfbai {

enum class FamilyKind { gaussian_known_variance, bernoulli };

// Shifted divergence arguments for Bernoulli arms may fall outside the open
// mean domain (0, 1); they are clamped this far inside before evaluation.
inline constexpr double kBernoulliDomainEps = 1e-9;

// One-parameter canonical exponential family identified by its mean.
// The admissible mean set is all of R for Gaussian with known variance and
// the open interval (0, 1) for Bernoulli.
struct RewardFamily {
  FamilyKind kind = FamilyKind::gaussian_known_variance;
  double sigma2 = 1.0;  // used only by the Gaussian family

  static RewardFamily gaussian(double sigma2);
  static RewardFamily bernoulli();

  bool in_domain(double mean) const;

  // Identity for Gaussian; clamps into [eps, 1 - eps] for Bernoulli.
  double clamp_to_domain(double x) const;
};

// KL divergence d(p, q) between the family members with means p and q.
double kl(const RewardFamily& family, double p, double q);

// d+(p, q) = d(p, q) 1{p <= q}
double kl_plus(const RewardFamily& family, double p, double q);

// d-(p, q) = d(p, q) 1{p >= q}
double kl_minus(const RewardFamily& family, double p, double q);

// Variance of the family member with mean p.
double variance(const RewardFamily& family, double p);

}  // namespace mfbai

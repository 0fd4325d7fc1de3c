#include "mfbai/divergences.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfbai {
namespace {

void require_in_domain(const RewardFamily& family, double mean) {
  if (!family.in_domain(mean)) {
    throw std::domain_error("mean outside the admissible set of the family");
  }
}

}  // namespace

RewardFamily RewardFamily::gaussian(double sigma2) {
  if (!(sigma2 > 0.0)) {
    throw std::domain_error("gaussian family requires sigma2 > 0");
  }
  return RewardFamily{FamilyKind::gaussian_known_variance, sigma2};
}

RewardFamily RewardFamily::bernoulli() {
  return RewardFamily{FamilyKind::bernoulli, 0.0};
}

bool RewardFamily::in_domain(double mean) const {
  if (!std::isfinite(mean)) return false;
  if (kind == FamilyKind::bernoulli) return mean > 0.0 && mean < 1.0;
  return true;
}

double RewardFamily::clamp_to_domain(double x) const {
  if (kind == FamilyKind::bernoulli) {
    return std::clamp(x, kBernoulliDomainEps, 1.0 - kBernoulliDomainEps);
  }
  return x;
}

double kl(const RewardFamily& family, double p, double q) {
  require_in_domain(family, p);
  require_in_domain(family, q);
  if (p == q) return 0.0;
  if (family.kind == FamilyKind::gaussian_known_variance) {
    double d = p - q;
    return d * d / (2.0 * family.sigma2);
  }
  return p * std::log(p / q) + (1.0 - p) * std::log((1.0 - p) / (1.0 - q));
}

double kl_plus(const RewardFamily& family, double p, double q) {
  return p <= q ? kl(family, p, q) : 0.0;
}

double kl_minus(const RewardFamily& family, double p, double q) {
  return p >= q ? kl(family, p, q) : 0.0;
}

double variance(const RewardFamily& family, double p) {
  require_in_domain(family, p);
  if (family.kind == FamilyKind::gaussian_known_variance) return family.sigma2;
  return p * (1.0 - p);
}

}  // namespace mfbai

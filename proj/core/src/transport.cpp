#include "mfbai/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace mfbai {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kIntervalTol = 1e-12;

// One additive term c * [d-(mu, x + xi) + d+(mu, x - xi)] of the projection
// objective, with c the effective coefficient (w/lambda or a raw count).
struct Term {
  double c;
  double mu;
  double xi;
};

double term_value(const Term& t, const RewardFamily& family, double x) {
  double out = 0.0;
  if (x <= t.mu - t.xi) {
    out += kl(family, t.mu, family.clamp_to_domain(x + t.xi));
  }
  if (x >= t.mu + t.xi) {
    out += kl(family, t.mu, family.clamp_to_domain(x - t.xi));
  }
  return t.c * out;
}

double objective(std::span<const Term> terms, const RewardFamily& family,
                 double x) {
  double sum = 0.0;
  for (const Term& t : terms) sum += term_value(t, family, x);
  return sum;
}

// d/dq of d(p, q) is (q - p) / v(q); zero when the clamp is active.
double kl_slope(const RewardFamily& family, double p, double q) {
  double qc = family.clamp_to_domain(q);
  if (qc != q) return 0.0;
  return (q - p) / variance(family, q);
}

double derivative(std::span<const Term> terms, const RewardFamily& family,
                  double x) {
  double sum = 0.0;
  for (const Term& t : terms) {
    if (t.c == 0.0) continue;
    if (x <= t.mu - t.xi) sum += t.c * kl_slope(family, t.mu, x + t.xi);
    if (x >= t.mu + t.xi) sum += t.c * kl_slope(family, t.mu, x - t.xi);
  }
  return sum;
}

struct MinimizeResult {
  double x = 0.0;
  double value = 0.0;
};

// Stationary point inside [lo, hi] where the indicator pattern is constant.
// With constant variance the first-order condition is linear and solved in
// closed form; otherwise the monotone derivative is bisected.
double solve_in_interval(std::span<const Term> terms,
                         const RewardFamily& family, double lo, double hi,
                         double probe) {
  if (family.kind == FamilyKind::gaussian_known_variance) {
    double num = 0.0;
    double den = 0.0;
    for (const Term& t : terms) {
      if (t.c == 0.0) continue;
      if (probe <= t.mu - t.xi) {
        num += t.c * (t.mu - t.xi);
        den += t.c;
      }
      if (probe >= t.mu + t.xi) {
        num += t.c * (t.mu + t.xi);
        den += t.c;
      }
    }
    if (den == 0.0) return probe;  // objective flat here
    return num / den;
  }
  double a = std::max(lo, family.clamp_to_domain(lo));
  double b = std::min(hi, family.clamp_to_domain(hi));
  for (int it = 0; it < 200 && b - a > 1e-15; ++it) {
    double mid = 0.5 * (a + b);
    if (derivative(terms, family, mid) < 0.0) {
      a = mid;
    } else {
      b = mid;
    }
  }
  return 0.5 * (a + b);
}

// Global minimum of the convex piecewise objective by breakpoint scan: the
// derivative is continuous and nondecreasing, so the minimiser sits in the
// first interval whose right endpoint has nonnegative slope. If the terms
// admit a common zero-cost point, the canonical representative is the
// midpoint of the feasibility interval.
MinimizeResult minimize_objective(std::span<const Term> terms,
                                  const RewardFamily& family,
                                  double fallback) {
  thread_local std::vector<double> breaks;

  double feas_lo = -kInf;
  double feas_hi = kInf;
  bool any_active = false;
  for (const Term& t : terms) {
    if (t.c == 0.0) continue;
    any_active = true;
    feas_lo = std::max(feas_lo, t.mu - t.xi);
    feas_hi = std::min(feas_hi, t.mu + t.xi);
  }
  if (!any_active) return {family.clamp_to_domain(fallback), 0.0};

  double dom_lo = -kInf;
  double dom_hi = kInf;
  if (family.kind == FamilyKind::bernoulli) {
    dom_lo = kBernoulliDomainEps;
    dom_hi = 1.0 - kBernoulliDomainEps;
  }

  if (feas_lo <= feas_hi) {
    double lo = std::max(feas_lo, dom_lo);
    double hi = std::min(feas_hi, dom_hi);
    if (lo <= hi) return {0.5 * (lo + hi), 0.0};
  }

  breaks.clear();
  for (const Term& t : terms) {
    if (t.c == 0.0) continue;
    breaks.push_back(t.mu - t.xi);
    breaks.push_back(t.mu + t.xi);
  }
  std::sort(breaks.begin(), breaks.end());
  breaks.erase(std::unique(breaks.begin(), breaks.end()), breaks.end());
  // Restrict the scan to the mean domain; its endpoints act as sentinels.
  if (dom_lo > -kInf) {
    std::erase_if(breaks, [&](double b) { return b <= dom_lo || b >= dom_hi; });
    breaks.insert(breaks.begin(), dom_lo);
    breaks.push_back(dom_hi);
  }

  std::size_t n = breaks.size();
  std::size_t first_up = n;
  for (std::size_t k = 0; k < n; ++k) {
    if (derivative(terms, family, breaks[k]) >= 0.0) {
      first_up = k;
      break;
    }
  }

  double lo, hi, probe;
  if (first_up == 0) {
    lo = -kInf;
    hi = breaks.front();
    probe = hi - 1.0;
  } else if (first_up == n) {
    lo = breaks.back();
    hi = kInf;
    probe = lo + 1.0;
  } else {
    lo = breaks[first_up - 1];
    hi = breaks[first_up];
    probe = 0.5 * (lo + hi);
  }

  double x = solve_in_interval(terms, family, lo, hi, probe);
  if (std::isfinite(lo)) x = std::max(x, lo - kIntervalTol);
  if (std::isfinite(hi)) x = std::min(x, hi + kIntervalTol);
  x = family.clamp_to_domain(x);

  double best_x = x;
  double best_v = objective(terms, family, x);
  for (double end : {lo, hi}) {
    if (!std::isfinite(end)) continue;
    double v = objective(terms, family, end);
    if (v < best_v) {
      best_v = v;
      best_x = end;
    }
  }
  return {best_x, best_v};
}

void collect_row(std::vector<Term>& out, std::span<const double> coeffs,
                 std::span<const double> means, std::span<const double> xi) {
  for (std::size_t m = 0; m < means.size(); ++m) {
    out.push_back(Term{coeffs[m], means[m], xi[m]});
  }
}

PsiSolution solve_psi_coeffs(std::span<const double> coeffs,
                             std::span<const double> means,
                             std::span<const double> xi,
                             const RewardFamily& family) {
  thread_local std::vector<Term> terms;
  terms.clear();
  collect_row(terms, coeffs, means, xi);
  auto res = minimize_objective(terms, family, means.back());
  return {res.x, res.value};
}

EtaSolution solve_eta_coeffs(std::span<const double> coeffs_i,
                             std::span<const double> coeffs_j,
                             std::span<const double> means_i,
                             std::span<const double> means_j,
                             std::span<const double> xi,
                             const RewardFamily& family) {
  thread_local std::vector<Term> terms;
  terms.clear();
  collect_row(terms, coeffs_i, means_i, xi);
  collect_row(terms, coeffs_j, means_j, xi);
  double fallback = 0.5 * (means_i.back() + means_j.back());
  auto res = minimize_objective(terms, family, fallback);
  return {res.x, res.value};
}

// Pairwise transport with precomputed per-arm projections.
TransportResult pair_from_psis(std::span<const double> coeffs,
                               std::span<const double> means,
                               std::span<const double> xi, std::size_t M,
                               std::size_t i, std::size_t j,
                               const PsiSolution& psi_i,
                               const PsiSolution& psi_j,
                               const RewardFamily& family) {
  TransportResult out;
  out.i = i;
  out.j = j;
  out.psi_i = psi_i.psi;
  out.psi_j = psi_j.psi;
  if (psi_j.psi > psi_i.psi) {
    out.regime = TransportRegime::separated;
    out.value = psi_i.value + psi_j.value;
    out.eta = std::numeric_limits<double>::quiet_NaN();
    return out;
  }
  auto eta = solve_eta_coeffs(coeffs.subspan(i * M, M), coeffs.subspan(j * M, M),
                              means.subspan(i * M, M), means.subspan(j * M, M),
                              xi, family);
  out.regime = TransportRegime::merged;
  out.value = eta.value;
  out.eta = eta.eta;
  return out;
}

struct MaxMinScratch {
  std::vector<PsiSolution> psis;
  std::vector<double> coeffs;
};

// Shared engine behind big_f and the GLR stopping statistic: per-arm
// projections are solved once per row and reused across the K(K-1) pairs.
BigFResult max_min_transport(std::span<const double> coeffs,
                             std::span<const double> means,
                             const FidelitySchedule& schedule,
                             const RewardFamily& family) {
  thread_local MaxMinScratch scratch;
  std::size_t M = schedule.size();
  std::size_t K = means.size() / M;
  std::span<const double> xi(schedule.xi);

  scratch.psis.resize(K);
  for (std::size_t k = 0; k < K; ++k) {
    scratch.psis[k] = solve_psi_coeffs(coeffs.subspan(k * M, M),
                                       means.subspan(k * M, M), xi, family);
  }

  BigFResult best;
  best.value = -1.0;
  for (std::size_t i = 0; i < K; ++i) {
    double row_min = kInf;
    TransportResult row_attaining;
    for (std::size_t j = 0; j < K; ++j) {
      if (j == i) continue;
      auto r = pair_from_psis(coeffs, means, xi, M, i, j, scratch.psis[i],
                              scratch.psis[j], family);
      if (r.value < row_min) {
        row_min = r.value;
        row_attaining = r;
      }
      if (row_min == 0.0) break;
    }
    if (row_min > best.value) {
      best.value = row_min;
      best.i = i;
      best.j = row_attaining.j;
      best.attaining = row_attaining;
    }
  }
  return best;
}

std::vector<double> cost_coefficients(const WeightVector& weights,
                                      const FidelitySchedule& schedule) {
  std::vector<double> coeffs(weights.size());
  for (std::size_t a = 0; a < weights.arms; ++a) {
    for (std::size_t m = 0; m < weights.fidelities; ++m) {
      coeffs[a * weights.fidelities + m] = weights(a, m) / schedule.lambda[m];
    }
  }
  return coeffs;
}

void check_shapes(std::size_t weights_size, std::span<const double> means,
                  const FidelitySchedule& schedule) {
  if (means.size() != weights_size || means.size() % schedule.size() != 0) {
    throw std::invalid_argument("weights/means/schedule shapes disagree");
  }
}

}  // namespace

PsiSolution solve_psi(std::span<const double> weights_row,
                      std::span<const double> means_row,
                      const FidelitySchedule& schedule,
                      const RewardFamily& family) {
  if (weights_row.empty() || weights_row.size() != means_row.size() ||
      weights_row.size() != schedule.size()) {
    throw std::domain_error("solve_psi: malformed weight row");
  }
  bool any_positive = false;
  for (double w : weights_row) {
    if (w < 0.0 || !std::isfinite(w)) {
      throw std::domain_error("solve_psi: weights must be finite and >= 0");
    }
    if (w > 0.0) any_positive = true;
  }
  if (!any_positive) {
    throw std::domain_error("solve_psi: weight row is identically zero");
  }
  thread_local std::vector<double> coeffs;
  coeffs.resize(weights_row.size());
  for (std::size_t m = 0; m < weights_row.size(); ++m) {
    coeffs[m] = weights_row[m] / schedule.lambda[m];
  }
  return solve_psi_coeffs(coeffs, means_row, schedule.xi, family);
}

EtaSolution solve_eta(std::span<const double> weights_i,
                      std::span<const double> weights_j,
                      std::span<const double> means_i,
                      std::span<const double> means_j,
                      const FidelitySchedule& schedule,
                      const RewardFamily& family) {
  std::size_t M = schedule.size();
  if (weights_i.size() != M || weights_j.size() != M || means_i.size() != M ||
      means_j.size() != M) {
    throw std::domain_error("solve_eta: malformed pair data");
  }
  thread_local std::vector<double> coeffs;
  coeffs.resize(2 * M);
  for (std::size_t m = 0; m < M; ++m) {
    coeffs[m] = weights_i[m] / schedule.lambda[m];
    coeffs[M + m] = weights_j[m] / schedule.lambda[m];
  }
  return solve_eta_coeffs({coeffs.data(), M}, {coeffs.data() + M, M}, means_i,
                          means_j, schedule.xi, family);
}

TransportResult transport_pair(const WeightVector& weights,
                               std::span<const double> means, std::size_t i,
                               std::size_t j, const FidelitySchedule& schedule,
                               const RewardFamily& family) {
  check_shapes(weights.size(), means, schedule);
  if (i == j) throw std::invalid_argument("transport_pair: i must differ from j");
  std::size_t M = schedule.size();
  auto coeffs = cost_coefficients(weights, schedule);
  std::span<const double> xi(schedule.xi);
  auto psi_i = solve_psi_coeffs({coeffs.data() + i * M, M},
                                means.subspan(i * M, M), xi, family);
  auto psi_j = solve_psi_coeffs({coeffs.data() + j * M, M},
                                means.subspan(j * M, M), xi, family);
  return pair_from_psis(coeffs, means, xi, M, i, j, psi_i, psi_j, family);
}

TransportResult transport_pair_counts(std::span<const double> counts,
                                      std::span<const double> means,
                                      std::size_t i, std::size_t j,
                                      const FidelitySchedule& schedule,
                                      const RewardFamily& family) {
  check_shapes(counts.size(), means, schedule);
  if (i == j) throw std::invalid_argument("transport_pair: i must differ from j");
  std::size_t M = schedule.size();
  std::span<const double> xi(schedule.xi);
  auto psi_i = solve_psi_coeffs(counts.subspan(i * M, M),
                                means.subspan(i * M, M), xi, family);
  auto psi_j = solve_psi_coeffs(counts.subspan(j * M, M),
                                means.subspan(j * M, M), xi, family);
  return pair_from_psis(counts, means, xi, M, i, j, psi_i, psi_j, family);
}

BigFResult big_f(const WeightVector& weights, std::span<const double> means,
                 const FidelitySchedule& schedule,
                 const RewardFamily& family) {
  check_shapes(weights.size(), means, schedule);
  auto coeffs = cost_coefficients(weights, schedule);
  return max_min_transport(coeffs, means, schedule, family);
}

BigFResult big_f_counts(std::span<const double> counts,
                        std::span<const double> means,
                        const FidelitySchedule& schedule,
                        const RewardFamily& family) {
  check_shapes(counts.size(), means, schedule);
  return max_min_transport(counts, means, schedule, family);
}

Subgradient subgradient_f(const WeightVector& weights,
                          std::span<const double> means,
                          const FidelitySchedule& schedule,
                          const RewardFamily& family) {
  return subgradient_from(big_f(weights, means, schedule, family), means,
                          schedule, family);
}

Subgradient subgradient_from(const BigFResult& best,
                             std::span<const double> means,
                             const FidelitySchedule& schedule,
                             const RewardFamily& family) {
  if (!(best.value > 0.0)) {
    throw std::domain_error(
        "subgradient_f requires a positive max-min value; perturb ties first");
  }
  std::size_t M = schedule.size();
  Subgradient grad;
  grad.values.assign(means.size(), 0.0);
  grad.i = best.i;
  grad.j = best.j;

  const TransportResult& r = best.attaining;
  for (std::size_t row : {best.i, best.j}) {
    double anchor = (r.regime == TransportRegime::merged)
                        ? r.eta
                        : (row == best.i ? r.psi_i : r.psi_j);
    for (std::size_t m = 0; m < M; ++m) {
      double mu = means[row * M + m];
      double xi = schedule.xi[m];
      double g = 0.0;
      if (mu <= anchor - xi) {
        g += kl(family, mu, family.clamp_to_domain(anchor - xi));
      }
      if (mu >= anchor + xi) {
        g += kl(family, mu, family.clamp_to_domain(anchor + xi));
      }
      grad.values[row * M + m] = g / schedule.lambda[m];
    }
  }
  return grad;
}

std::vector<double> glr_matrix(const WeightVector& counts,
                               std::span<const double> means,
                               const FidelitySchedule& schedule,
                               const RewardFamily& family) {
  check_shapes(counts.size(), means, schedule);
  std::size_t M = schedule.size();
  std::size_t K = counts.arms;
  std::span<const double> xi(schedule.xi);
  std::span<const double> coeffs(counts.values);

  std::vector<PsiSolution> psis(K);
  for (std::size_t k = 0; k < K; ++k) {
    psis[k] = solve_psi_coeffs(coeffs.subspan(k * M, M),
                               means.subspan(k * M, M), xi, family);
  }
  std::vector<double> stat(K * K, 0.0);
  for (std::size_t i = 0; i < K; ++i) {
    for (std::size_t j = 0; j < K; ++j) {
      if (i == j) continue;
      stat[i * K + j] =
          pair_from_psis(coeffs, means, xi, M, i, j, psis[i], psis[j], family)
              .value;
    }
  }
  return stat;
}

}  // namespace mfbai

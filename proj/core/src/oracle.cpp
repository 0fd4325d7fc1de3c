#include "mfbai/oracle.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace mfbai {
namespace {

WeightVector simplex_from_log(const std::vector<double>& log_w, std::size_t K,
                              std::size_t M) {
  double top = *std::max_element(log_w.begin(), log_w.end());
  std::vector<double> w(log_w.size());
  double sum = 0.0;
  for (std::size_t k = 0; k < log_w.size(); ++k) {
    w[k] = std::exp(log_w[k] - top);
    sum += w[k];
  }
  for (double& v : w) v /= sum;
  // Renormalise exactly so the simplex invariant holds bit-tight.
  double s2 = 0.0;
  for (double v : w) s2 += v;
  for (double& v : w) v /= s2;
  return WeightVector::simplex(std::move(w), K, M);
}

}  // namespace

OracleSolution solve_oracle(const BanditInstance& instance,
                            const OracleOptions& options) {
  if (!instance.has_unique_best()) {
    throw std::invalid_argument(
        "solve_oracle requires a unique best arm at the top fidelity");
  }
  std::size_t K = instance.arms;
  std::size_t M = instance.fidelities;
  std::span<const double> means(instance.means);

  std::vector<double> log_w(K * M, 0.0);
  WeightVector omega = WeightVector::uniform_simplex(K, M);

  OracleSolution best;
  best.omega_star = omega;
  best.f_star = -1.0;
  best.iterations = options.iterations;
  double tail_best = -1.0;
  std::size_t tail_start =
      options.iterations - std::min(options.iterations, options.iterations / 10);

  auto consider = [&](const WeightVector& w, double value, std::size_t t) {
    if (value > best.f_star) {
      best.f_star = value;
      best.omega_star = w;
    }
    if (t >= tail_start && value > tail_best) tail_best = value;
  };

  for (std::size_t t = 1; t <= options.iterations; ++t) {
    BigFResult bf = big_f(omega, means, instance.schedule, instance.family);
    consider(omega, bf.value, t - 1);
    Subgradient grad =
        subgradient_from(bf, means, instance.schedule, instance.family);
    double alpha = options.alpha0 / std::sqrt(static_cast<double>(t));
    for (std::size_t k = 0; k < log_w.size(); ++k) {
      log_w[k] += alpha * grad.values[k];
    }
    omega = simplex_from_log(log_w, K, M);
  }
  consider(omega, big_f(omega, means, instance.schedule, instance.family).value,
           options.iterations);
  best.stationarity_gap = best.f_star - tail_best;
  return best;
}

double lower_bound_cost(const BanditInstance& instance, double delta,
                        const OracleOptions& options) {
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("delta must lie in (0, 1)");
  }
  OracleSolution sol = solve_oracle(instance, options);
  return std::log(1.0 / (2.4 * delta)) / sol.f_star;
}

std::vector<unsigned char> zero_weight_mask(const BanditInstance& instance) {
  if (!instance.satisfies_mf()) {
    throw std::invalid_argument(
        "zero_weight_mask requires a bias-consistent instance");
  }
  if (!instance.has_unique_best()) {
    throw std::invalid_argument("zero_weight_mask requires a unique best arm");
  }
  std::size_t K = instance.arms;
  std::size_t M = instance.fidelities;
  std::size_t star = instance.best_arm();
  std::vector<unsigned char> mask(K * M, 0);
  for (std::size_t m = 0; m < M; ++m) {
    double xi = instance.schedule.xi[m];
    for (std::size_t a = 0; a < K; ++a) {
      if (a == star) {
        bool below_all = true;
        for (std::size_t j = 0; j < K; ++j) {
          if (j == star) continue;
          if (!(instance.mean(star, m) - xi < instance.mean(j, M - 1))) {
            below_all = false;
            break;
          }
        }
        mask[a * M + m] = below_all ? 1 : 0;
      } else {
        mask[a * M + m] =
            instance.mean(a, m) + xi > instance.mean(star, m) ? 1 : 0;
      }
    }
  }
  return mask;
}

namespace {

// Enumerates compositions of n into `dims` nonnegative parts.
template <typename Fn>
void for_each_composition(std::size_t n, std::size_t dims,
                          std::vector<std::size_t>& parts, std::size_t level,
                          Fn&& fn) {
  if (level + 1 == dims) {
    parts[level] = n;
    fn(parts);
    return;
  }
  for (std::size_t v = 0; v <= n; ++v) {
    parts[level] = v;
    for_each_composition(n - v, dims, parts, level + 1, fn);
  }
}

}  // namespace

OracleSolution brute_oracle_2xm(const BanditInstance& instance,
                                double resolution) {
  if (instance.arms != 2) {
    throw std::invalid_argument("brute_oracle_2xm supports two-arm instances");
  }
  if (instance.fidelities > 3) {
    throw std::invalid_argument("brute_oracle_2xm supports at most 3 fidelities");
  }
  if (!(resolution > 0.0 && resolution < 1.0)) {
    throw std::invalid_argument("resolution must lie in (0, 1)");
  }
  std::size_t n = static_cast<std::size_t>(std::lround(1.0 / resolution));
  std::size_t dims = instance.arms * instance.fidelities;
  std::span<const double> means(instance.means);

  OracleSolution best;
  best.f_star = -1.0;
  best.iterations = 0;
  std::vector<double> w(dims);
  std::vector<std::size_t> parts(dims, 0);
  for_each_composition(
      n, dims, parts, 0, [&](const std::vector<std::size_t>& p) {
        for (std::size_t k = 0; k < dims; ++k) {
          w[k] = static_cast<double>(p[k]) / static_cast<double>(n);
        }
        auto omega =
            WeightVector::simplex(w, instance.arms, instance.fidelities);
        double value =
            big_f(omega, means, instance.schedule, instance.family).value;
        ++best.iterations;
        if (value > best.f_star) {
          best.f_star = value;
          best.omega_star = std::move(omega);
        }
      });
  best.stationarity_gap = 0.0;
  return best;
}

}  // namespace mfbai

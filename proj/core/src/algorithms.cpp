#include "mfbai/algorithms.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "mfbai/harness.hpp"

namespace mfbai {
namespace {

constexpr double kWeightFloor = 1e-300;

void softmax_into(const std::vector<double>& scores, double alpha,
                  std::vector<double>& out) {
  double top = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  out.resize(scores.size());
  for (std::size_t k = 0; k < scores.size(); ++k) {
    out[k] = std::max(std::exp(alpha * (scores[k] - top)), kWeightFloor);
    sum += out[k];
  }
  for (double& v : out) v /= sum;
  double s2 = 0.0;
  for (double v : out) s2 += v;
  for (double& v : out) v /= s2;
}

}  // namespace

double stopping_threshold(std::size_t t, double delta, std::size_t arms,
                          std::size_t fidelities, ThresholdMode mode,
                          double c_tilde) {
  if (t == 0) throw std::domain_error("stopping_threshold requires t >= 1");
  if (!(delta > 0.0 && delta < 1.0)) {
    throw std::domain_error("delta must lie in (0, 1)");
  }
  double log_k_delta = std::log(static_cast<double>(arms) / delta);
  double log_t = std::log(static_cast<double>(t));
  double m = static_cast<double>(fidelities);
  if (mode == ThresholdMode::simplified) {
    return log_k_delta + m * std::log(log_t + 1.0);
  }
  return log_k_delta + 2.0 * m * std::log(4.0 * log_k_delta + 1.0) +
         12.0 * m * std::log(log_t + 3.0) + 2.0 * m * c_tilde;
}

std::vector<double> AlgoState::cost_proportions() const {
  std::vector<double> omega(costs);
  double total = 0.0;
  for (double c : omega) total += c;
  if (total > 0.0) {
    for (double& c : omega) c /= total;
  }
  return omega;
}

AlgoState mfgrad_init(const BanditInstance& instance, CounterRng& rng) {
  AlgoState s;
  s.arms = instance.arms;
  s.fidelities = instance.fidelities;
  std::size_t cells = s.arms * s.fidelities;
  s.counts.assign(cells, 0.0);
  s.costs.assign(cells, 0.0);
  s.reward_sums.assign(cells, 0.0);
  s.hat_mu.assign(cells, 0.0);
  s.cum_gains.assign(cells, 0.0);
  s.cum_pi_prime.assign(cells, 0.0);
  for (std::size_t a = 0; a < s.arms; ++a) {
    for (std::size_t m = 0; m < s.fidelities; ++m) {
      std::size_t k = a * s.fidelities + m;
      double reward = sample_reward(instance, a, m, rng);
      s.counts[k] = 1.0;
      s.costs[k] = instance.schedule.lambda[m];
      s.reward_sums[k] = reward;
      s.hat_mu[k] = instance.family.clamp_to_domain(reward);
      ++s.t;
    }
  }
  s.tilde_omega = WeightVector::uniform_simplex(s.arms, s.fidelities);
  return s;
}

void mfgrad_step(AlgoState& s, const MfGradConfig& config,
                 const BanditInstance& instance, CounterRng& rng) {
  if (s.t < s.arms * s.fidelities) {
    throw std::logic_error("mfgrad_step called before initialization");
  }
  const std::size_t M = s.fidelities;
  const std::size_t cells = s.arms * M;
  const auto& schedule = instance.schedule;
  double t = static_cast<double>(s.t);

  // Perturb the empirical model transiently when the best arm at the top
  // fidelity is tied, so the max-min value stays positive. The stored
  // means are never modified.
  std::span<const double> mu(s.hat_mu);
  std::vector<double> perturbed;
  {
    double top = -std::numeric_limits<double>::infinity();
    std::size_t ties = 0;
    std::size_t lowest = 0;
    for (std::size_t a = 0; a < s.arms; ++a) {
      double v = s.hat_mu[a * M + M - 1];
      if (v > top) {
        top = v;
        ties = 1;
        lowest = a;
      } else if (v == top) {
        ++ties;
      }
    }
    if (ties > 1) {
      perturbed = s.hat_mu;
      double raised = top + config.tie_epsilon;
      if (instance.family.in_domain(raised)) {
        perturbed[lowest * M + M - 1] = raised;
      } else {
        // at the domain ceiling: push the other tied arms down instead
        for (std::size_t a = lowest + 1; a < s.arms; ++a) {
          if (perturbed[a * M + M - 1] == top) {
            perturbed[a * M + M - 1] = instance.family.clamp_to_domain(
                top - config.tie_epsilon);
          }
        }
      }
      mu = perturbed;
    }
  }

  // Subgradient of the max-min value at the current cost proportions,
  // scaled by the mean cost per pull and clipped at G sqrt(t).
  BigFResult bf = big_f(s.tilde_omega, mu, schedule, instance.family);
  Subgradient grad = subgradient_from(bf, mu, schedule, instance.family);
  double inv_cost = 0.0;
  for (std::size_t a = 0; a < s.arms; ++a) {
    for (std::size_t m = 0; m < M; ++m) {
      inv_cost += s.tilde_omega(a, m) / schedule.lambda[m];
    }
  }
  double c_tilde = 1.0 / inv_cost;
  double cap = config.clip_constant * std::sqrt(t);
  for (std::size_t k = 0; k < cells; ++k) {
    s.cum_gains[k] += std::min(c_tilde * grad.values[k], cap);
  }

  // Exponential-weights maximiser of the KL-regularised ascent objective
  // with uniform prior.
  double alpha = config.learning_rate_mode == LearningRateMode::theory
                     ? config.rate_scale / std::sqrt(t + 1.0)
                     : config.constant_alpha;
  std::vector<double> next_omega;
  softmax_into(s.cum_gains, alpha, next_omega);
  s.tilde_omega =
      WeightVector::simplex(std::move(next_omega), s.arms, s.fidelities);

  // Forced exploration in pull space, then cumulative tracking.
  WeightVector pi = cost_to_pull(s.tilde_omega, schedule);
  double gamma = 1.0 / (4.0 * std::sqrt(t));
  double uniform = 1.0 / static_cast<double>(cells);
  for (std::size_t k = 0; k < cells; ++k) {
    s.cum_pi_prime[k] += (1.0 - gamma) * pi.values[k] + gamma * uniform;
  }
  std::size_t pick = 0;
  double best_deficit = -std::numeric_limits<double>::infinity();
  for (std::size_t k = 0; k < cells; ++k) {
    double deficit = s.cum_pi_prime[k] - s.counts[k];
    if (deficit > best_deficit) {
      best_deficit = deficit;
      pick = k;
    }
  }

  std::size_t arm = pick / M;
  std::size_t fid = pick % M;
  double reward = sample_reward(instance, arm, fid, rng);
  s.counts[pick] += 1.0;
  s.costs[pick] = schedule.lambda[fid] * s.counts[pick];
  s.reward_sums[pick] += reward;
  s.hat_mu[pick] =
      instance.family.clamp_to_domain(s.reward_sums[pick] / s.counts[pick]);
  ++s.t;
}

StopDecision mfgrad_should_stop(const AlgoState& state,
                                const MfGradConfig& config,
                                const BanditInstance& instance) {
  if (state.t < state.arms * state.fidelities) {
    throw std::logic_error("stopping rule undefined before initialization");
  }
  BigFResult bf = big_f_counts(state.counts, state.hat_mu, instance.schedule,
                               instance.family);
  double beta = stopping_threshold(state.t, config.delta, state.arms,
                                   state.fidelities, config.threshold_mode,
                                   config.c_tilde);
  return {bf.value >= beta, bf.i, bf.value, beta};
}

BanditInstance restrict_to_top_fidelity(const BanditInstance& instance) {
  std::size_t M = instance.fidelities;
  std::vector<double> means(instance.arms);
  for (std::size_t a = 0; a < instance.arms; ++a) {
    means[a] = instance.mean(a, M - 1);
  }
  return BanditInstance(instance.arms, 1, std::move(means), instance.family,
                        {{0.0}, {instance.schedule.lambda[M - 1]}});
}

LucbResult lucb_oracle_demo(const BanditInstance& instance,
                            const LucbOracleConfig& config, CounterRng& rng) {
  if (instance.arms != 2) {
    throw std::invalid_argument("lucb_oracle_demo supports two-arm instances");
  }
  std::size_t M = instance.fidelities;
  std::vector<std::size_t> targets = config.target_fidelities;
  if (targets.empty()) targets.assign(instance.arms, 0);
  if (targets.size() != instance.arms) {
    throw std::invalid_argument("one target fidelity per arm expected");
  }
  for (std::size_t f : targets) {
    if (f >= M) throw std::invalid_argument("target fidelity out of range");
  }

  std::vector<double> counts(instance.arms * M, 0.0);
  std::vector<double> sums(instance.arms * M, 0.0);
  std::size_t t = 0;

  auto bonus = [&](double n) {
    double arg = config.bonus_scale * std::pow(static_cast<double>(t), 4.0) /
                 config.delta;
    return std::sqrt(std::max(0.0, std::log(arg)) / n);
  };
  auto lcb = [&](std::size_t k) {
    double best = 0.0;
    for (std::size_t m = 0; m < M; ++m) {
      double n = counts[k * M + m];
      if (n == 0.0) continue;
      double hat = sums[k * M + m] / n;
      best = std::max(best, hat - instance.schedule.xi[m] - bonus(n));
    }
    return best;
  };
  auto ucb = [&](std::size_t k) {
    double best = 1.0;
    for (std::size_t m = 0; m < M; ++m) {
      double n = counts[k * M + m];
      if (n == 0.0) continue;
      double hat = sums[k * M + m] / n;
      best = std::min(best, hat + instance.schedule.xi[m] + bonus(n));
    }
    return best;
  };
  auto pull = [&](std::size_t k) {
    std::size_t m = targets[k];
    sums[k * M + m] += sample_reward(instance, k, m, rng);
    counts[k * M + m] += 1.0;
    ++t;
  };

  std::size_t leader = 0;
  std::size_t challenger = 1;
  LucbResult result;
  while (true) {
    if (lcb(leader) > ucb(challenger)) {
      result.stopped = true;
      break;
    }
    if (t >= config.max_steps) break;
    leader = ucb(0) >= ucb(1) ? 0 : 1;
    challenger = 1 - leader;
    pull(leader);
    pull(challenger);
  }
  result.steps = t;
  result.recommendation = leader;
  for (std::size_t k = 0; k < counts.size(); ++k) {
    result.total_cost += instance.schedule.lambda[k % M] * counts[k];
  }
  return result;
}

}  // namespace mfbai

#pragma once

#include <cstddef>
#include <vector>

#include "mfbai/model.hpp"
#include "mfbai/rng.hpp"
#include "mfbai/transport.hpp"

namespace mfbai {

enum class LearningRateMode { theory, constant_rate };
enum class ThresholdMode { simplified, theoretical };

struct MfGradConfig {
  double delta = 0.1;
  double clip_constant = 100.0;  // gains clipped at G sqrt(t)
  LearningRateMode learning_rate_mode = LearningRateMode::theory;
  // theory mode uses alpha_t = rate_scale / sqrt(t); the scale leaves the
  // decay (and every guarantee) untouched but sets how fast the weights
  // commit at experiment horizons.
  double rate_scale = 12.0;
  double constant_alpha = 0.25;  // used by constant_rate mode
  ThresholdMode threshold_mode = ThresholdMode::simplified;
  double c_tilde = 0.0;  // additive constant of the theoretical threshold
  double tie_epsilon = 1e-6;
};

// Stopping threshold beta_{t,delta}. The simplified form
//   log(K/delta) + M log(log(t) + 1)
// is the default; the theoretical form adds the loglog concentration terms
//   log(K/delta) + 2M log(4 log(K/delta) + 1) + 12M log(log(t) + 3) + 2M c~.
double stopping_threshold(std::size_t t, double delta, std::size_t arms,
                          std::size_t fidelities, ThresholdMode mode,
                          double c_tilde = 0.0);

// Mutable per-run state of the gradient sampler. Counts, costs, reward sums
// and empirical means are arm-major K x M; costs track lambda_m * N exactly.
struct AlgoState {
  std::size_t t = 0;
  std::size_t arms = 0;
  std::size_t fidelities = 0;
  std::vector<double> counts;
  std::vector<double> costs;
  std::vector<double> reward_sums;
  std::vector<double> hat_mu;
  std::vector<double> cum_gains;     // clipped scaled subgradients
  std::vector<double> cum_pi_prime;  // forced-exploration pull targets
  WeightVector tilde_omega;          // strictly positive cost proportions

  // Empirical cost proportions C(t) / sum C(t).
  std::vector<double> cost_proportions() const;
};

// Pulls each arm once at each fidelity and sets the uniform prior state.
AlgoState mfgrad_init(const BanditInstance& instance, CounterRng& rng);

// One sampling-rule round: subgradient ascent on the cost simplex, forced
// exploration in pull space, cumulative tracking, then one pull.
void mfgrad_step(AlgoState& state, const MfGradConfig& config,
                 const BanditInstance& instance, CounterRng& rng);

struct StopDecision {
  bool stop = false;
  std::size_t recommendation = 0;
  double statistic = 0.0;
  double threshold = 0.0;
};

// GLR test: stop once max_i min_{j != i} f_{i,j}(C(t), hat_mu(t)) clears the
// threshold; the recommendation is the maximising arm either way.
StopDecision mfgrad_should_stop(const AlgoState& state,
                                const MfGradConfig& config,
                                const BanditInstance& instance);

// Single-fidelity view keeping only the top-fidelity column; running the
// gradient sampler on it is the plain fixed-confidence baseline.
BanditInstance restrict_to_top_fidelity(const BanditInstance& instance);

// Two-arm LUCB given an oracle that fixes each arm's sampling fidelity.
// Indices combine every sampled fidelity: LCB_k = max_m (hat - xi_m - bonus),
// UCB_k = min_m (hat + xi_m + bonus), clamped to [0, 1], with
// bonus = sqrt(log(L t^4 / delta) / n).
struct LucbOracleConfig {
  double delta = 0.01;
  double bonus_scale = 1.0;  // L
  std::vector<std::size_t> target_fidelities;  // per arm
  std::size_t max_steps = 1000000;
};

struct LucbResult {
  bool stopped = false;
  std::size_t steps = 0;
  double total_cost = 0.0;
  std::size_t recommendation = 0;
};

LucbResult lucb_oracle_demo(const BanditInstance& instance,
                            const LucbOracleConfig& config, CounterRng& rng);

}  // namespace mfbai

#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <utility>
#include <vector>

#include "mfbai/algorithms.hpp"
#include "mfbai/model.hpp"
#include "mfbai/rng.hpp"

namespace mfbai {

// One sampled observation of (arm, fidelity).
double sample_reward(const BanditInstance& instance, std::size_t arm,
                     std::size_t fid, CounterRng& rng);

enum class AlgoKind { mfgrad, mfgrad_const, grad, lucb_oracle };

std::string algo_name(AlgoKind kind);
AlgoKind algo_from_name(const std::string& name);

// Per-trial outcome. total_cost is sum_m lambda_m N_{a,m}(tau) exactly;
// when the budget ran out before the stopping rule fired, stopped is false
// and the recommendation is the forced argmax at the final state.
struct RunRecord {
  std::string algo;
  std::uint64_t seed = 0;
  std::size_t trial = 0;
  bool stopped = false;
  std::size_t tau = 0;
  double total_cost = 0.0;
  std::size_t recommendation = 0;
  bool correct = false;
  bool forced = false;
  // (t, empirical cost proportions) snapshots, recorded every
  // trajectory_stride pulls after the initialization phase.
  std::vector<std::pair<std::size_t, std::vector<double>>> trajectory;
};

struct ExperimentSpec {
  BanditInstance instance;
  AlgoKind algo = AlgoKind::mfgrad;
  MfGradConfig config;      // gradient samplers
  LucbOracleConfig lucb;    // the LUCB demonstrator
  std::size_t trials = 1;
  double delta = 0.1;       // copied into the active config per trial
  std::uint64_t seed = 0;
  std::size_t max_steps = 1000000;
  double max_cost = 0.0;    // 0 = unlimited
  std::size_t trajectory_stride = 0;  // 0 = no snapshots
  bool use_stopping_rule = true;
};

// Runs one trial with an independent stream derived from (seed, trial_index).
RunRecord run_trial(const ExperimentSpec& spec, std::size_t trial_index);

struct BatchSummary {
  std::size_t trials = 0;
  double mean_cost = 0.0;
  double median_cost = 0.0;
  double q1_cost = 0.0;
  double q3_cost = 0.0;
  double error_rate = 0.0;
  std::size_t unstopped = 0;
};

struct BatchResult {
  std::vector<RunRecord> records;  // ordered by trial index
  BatchSummary summary;
};

// Trials are independent and may run on a worker pool; results are identical
// to serial execution. threads == 0 picks the hardware concurrency.
BatchResult run_batch(const ExperimentSpec& spec, std::size_t threads = 0);

BatchSummary summarize(const std::vector<RunRecord>& records);

// Random bias-consistent Gaussian instance: top-fidelity means are drawn
// uniformly with a minimum pairwise gap, lower-fidelity means uniformly in
// [mu - a_m - b_m/2, mu + a_m + b_m/2], and xi_m = a_m + b_m/2. The spread
// vectors must be nonincreasing with final entry zero.
BanditInstance random_instance_gen(std::size_t arms, std::size_t fidelities,
                                   const std::vector<double>& a,
                                   const std::vector<double>& b,
                                   double min_gap, std::uint64_t seed,
                                   const std::vector<double>& lambda,
                                   double sigma2 = 0.1);

// CSV schema: algo,seed,trial,stopped,tau,total_cost,recommendation,correct.
void write_records_csv(const std::string& path,
                       const std::vector<RunRecord>& records);
std::vector<RunRecord> read_records_csv(const std::string& path);

// One file per trial: column t then omega_a_m in arm-major order.
void write_trajectory_csv(const std::string& path, const RunRecord& record,
                          std::size_t arms, std::size_t fidelities);

std::string summary_to_json(const ExperimentSpec& spec,
                            const BatchSummary& summary);

// Shipped experiment presets. fig1/fig2 compare the gradient samplers on the
// 4x5 and 5x2 instances, fig3 records cost-proportion trajectories, and
// lucb-bug reproduces the non-stopping behaviour of fidelity-locked LUCB.
struct DemoRun {
  std::string label;
  ExperimentSpec spec;
};

std::vector<DemoRun> make_demo(const std::string& name,
                               std::size_t trials_override = 0);
std::vector<std::string> demo_names();

}  // namespace mfbai

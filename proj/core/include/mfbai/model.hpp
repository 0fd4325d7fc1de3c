#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "mfbai/divergences.hpp"

namespace mfbai {

// Precision/cost ladder over fidelities. Bias bounds xi must be strictly
// decreasing with the last entry exactly zero (the top fidelity is unbiased);
// costs lambda must be positive and strictly increasing.
struct FidelitySchedule {
  std::vector<double> xi;
  std::vector<double> lambda;

  std::size_t size() const { return xi.size(); }
};

// K x M matrix of arm means plus the reward family and fidelity schedule.
// Means are stored arm-major: mean(a, m) = means[a * M + m].
struct BanditInstance {
  std::size_t arms = 0;
  std::size_t fidelities = 0;
  std::vector<double> means;
  RewardFamily family;
  FidelitySchedule schedule;

  BanditInstance() = default;
  BanditInstance(std::size_t arms, std::size_t fidelities,
                 std::vector<double> means, RewardFamily family,
                 FidelitySchedule schedule);

  double mean(std::size_t arm, std::size_t fid) const {
    return means[arm * fidelities + fid];
  }

  // Index of the arm maximising the top-fidelity mean, lowest index on ties.
  std::size_t best_arm() const;
  bool has_unique_best() const;

  // Whether |mean(a, m) - mean(a, M-1)| <= xi[m] for every cell, with a
  // 1e-12 slack so instances specified on the boundary in decimal are not
  // rejected for binary rounding.
  bool satisfies_mf() const;
};

struct ValidationReport {
  bool ok = true;           // no hard errors
  bool is_mf = false;       // multi-fidelity bias constraints hold
  bool unique_best = false;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
};

// Schedule monotonicity, mean-domain membership, bias constraints and
// best-arm uniqueness. Bias violations are warnings (estimated models
// legitimately violate them); the rest are errors.
ValidationReport validate(const BanditInstance& instance);

enum class Normalization { simplex, raw };

// Nonnegative K x M allocation, either a point of the simplex (cost or pull
// proportions) or raw magnitudes (counts, costs).
struct WeightVector {
  std::vector<double> values;  // arm-major
  std::size_t arms = 0;
  std::size_t fidelities = 0;
  Normalization normalization = Normalization::raw;

  static WeightVector simplex(std::vector<double> values, std::size_t arms,
                              std::size_t fidelities);
  static WeightVector raw(std::vector<double> values, std::size_t arms,
                          std::size_t fidelities);
  static WeightVector uniform_simplex(std::size_t arms,
                                      std::size_t fidelities);

  double operator()(std::size_t arm, std::size_t fid) const {
    return values[arm * fidelities + fid];
  }
  std::size_t size() const { return values.size(); }
};

// Pull proportions induced by cost proportions: pi ~ omega_{a,m} / lambda_m.
WeightVector cost_to_pull(const WeightVector& omega,
                          const FidelitySchedule& schedule);

// Cost proportions induced by pull proportions: omega ~ lambda_m pi_{a,m}.
WeightVector pull_to_cost(const WeightVector& pi,
                          const FidelitySchedule& schedule);

// JSON document {K, M, family:{kind, sigma2?}, xi, lambda, mu:[[row per arm]]}.
std::string instance_to_json(const BanditInstance& instance);
BanditInstance instance_from_json(const std::string& text);
BanditInstance load_instance(const std::string& path);
void save_instance(const BanditInstance& instance, const std::string& path);

// Built-in named instances: "table-mu1", "table-mu2", "table-mu3",
// "five-by-two", "lucb-2x2" and the parametric "compare-lb(gap,xi,lo,hi)"
// (also accepted without arguments, using gap=0.2, xi=0.2, lo=1, hi=5).
BanditInstance make_preset(const std::string& name);
std::vector<std::string> preset_names();

// Resolves either a preset name or a path to an instance JSON file.
BanditInstance resolve_instance(const std::string& name_or_path);

}  // namespace mfbai

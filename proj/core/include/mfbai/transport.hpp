#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "mfbai/divergences.hpp"
#include "mfbai/model.hpp"

namespace mfbai {

// Minimiser of the one-arm projection objective
//   sum_m w_m [d-(mu_m, psi + xi_m) + d+(mu_m, psi - xi_m)] / lambda_m.
struct PsiSolution {
  double psi = 0.0;
  double value = 0.0;
};

// Minimiser of the two-arm common-mean objective over eta.
struct EtaSolution {
  double eta = 0.0;
  double value = 0.0;
};

enum class TransportRegime { merged, separated };

// Value and minimisers of the pairwise transport cost f_{i,j}. When the two
// per-arm projections already satisfy psi_j > psi_i the alternative keeps
// them separated; otherwise both arms share the common mean eta.
struct TransportResult {
  double value = 0.0;
  TransportRegime regime = TransportRegime::merged;
  double eta = 0.0;  // meaningful in the merged regime only
  double psi_i = 0.0;
  double psi_j = 0.0;
  std::size_t i = 0;
  std::size_t j = 0;
};

// Max-min transport value together with one attaining ordered pair.
struct BigFResult {
  double value = 0.0;
  std::size_t i = 0;  // arm attaining the outer max
  std::size_t j = 0;  // its hardest competitor
  TransportResult attaining;
};

// Supergradient of the max-min value in the cost weights; supported on the
// two rows of the attaining pair, hence at most 2M nonzero entries.
struct Subgradient {
  std::vector<double> values;  // K x M, arm-major
  std::size_t i = 0;
  std::size_t j = 0;
};

PsiSolution solve_psi(std::span<const double> weights_row,
                      std::span<const double> means_row,
                      const FidelitySchedule& schedule,
                      const RewardFamily& family);

EtaSolution solve_eta(std::span<const double> weights_i,
                      std::span<const double> weights_j,
                      std::span<const double> means_i,
                      std::span<const double> means_j,
                      const FidelitySchedule& schedule,
                      const RewardFamily& family);

// f_{i,j}(w, mu) with weights in the cost convention: each term is scaled by
// w_{a,m} / lambda_m. Accepts simplex or raw weights.
TransportResult transport_pair(const WeightVector& weights,
                               std::span<const double> means, std::size_t i,
                               std::size_t j, const FidelitySchedule& schedule,
                               const RewardFamily& family);

// Same computation with per-term coefficients taken directly from counts
// (the cost factors cancel); this is the GLR form used by stopping rules.
TransportResult transport_pair_counts(std::span<const double> counts,
                                      std::span<const double> means,
                                      std::size_t i, std::size_t j,
                                      const FidelitySchedule& schedule,
                                      const RewardFamily& family);

// F(w, mu) = max_i min_{j != i} f_{i,j}(w, mu) over all ordered pairs,
// ties broken towards the lowest arm index then lowest competitor index.
BigFResult big_f(const WeightVector& weights, std::span<const double> means,
                 const FidelitySchedule& schedule, const RewardFamily& family);

// Counts-convention max-min, used by the stopping and decision rules.
BigFResult big_f_counts(std::span<const double> counts,
                        std::span<const double> means,
                        const FidelitySchedule& schedule,
                        const RewardFamily& family);

// Requires big_f(weights, means) > 0; throws std::domain_error otherwise
// (callers perturb ties away first).
Subgradient subgradient_f(const WeightVector& weights,
                          std::span<const double> means,
                          const FidelitySchedule& schedule,
                          const RewardFamily& family);

// Same, at a max-min value the caller has already computed.
Subgradient subgradient_from(const BigFResult& best,
                             std::span<const double> means,
                             const FidelitySchedule& schedule,
                             const RewardFamily& family);

// K x K matrix of pairwise GLR statistics f_{i,j} evaluated on counts;
// diagonal entries are set to zero and carry no meaning.
std::vector<double> glr_matrix(const WeightVector& counts,
                               std::span<const double> means,
                               const FidelitySchedule& schedule,
                               const RewardFamily& family);

}  // namespace mfbai

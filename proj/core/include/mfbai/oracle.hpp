#pragma once

#include <cstddef>
#include <cstdint>
#include <vector>

#include "mfbai/model.hpp"
#include "mfbai/transport.hpp"

namespace mfbai {

struct OracleOptions {
  std::size_t iterations = 500000;
  double alpha0 = 4.0;  // step size alpha0 / sqrt(t)
  std::uint64_t seed = 0;  // reserved; the ascent itself is deterministic
};

struct OracleSolution {
  WeightVector omega_star;   // cost-proportion simplex point
  double f_star = 0.0;       // max-min value at omega_star, i.e. 1 / C*(mu)
  std::size_t iterations = 0;
  // Best value found overall minus the best over the trailing 10% of
  // iterates; small values indicate the ascent has settled.
  double stationarity_gap = 0.0;
};

// Maximises the concave max-min transport value over the cost simplex by
// exponentiated subgradient ascent with best-iterate selection. Requires a
// unique best arm. Intended for bias-consistent instances; run validate()
// first to surface violations.
OracleSolution solve_oracle(const BanditInstance& instance,
                            const OracleOptions& options = {});

// C*(mu) log(1 / (2.4 delta)) using the solved max-min value.
double lower_bound_cost(const BanditInstance& instance, double delta,
                        const OracleOptions& options = {});

// Sufficient conditions for coordinates that every optimal allocation must
// leave at zero: for a != star, cells where mean(a, m) + xi_m overshoots
// mean(star, m); for the best arm, fidelities whose pessimistic value falls
// below every competitor's top-fidelity mean. Strict inequalities keep
// boundary-equality cells unmasked. Requires a bias-consistent instance.
std::vector<unsigned char> zero_weight_mask(const BanditInstance& instance);

// Exhaustive simplex grid search for two-arm instances (M <= 3); a test
// oracle for solve_oracle. `resolution` is the grid spacing.
OracleSolution brute_oracle_2xm(const BanditInstance& instance,
                                double resolution);

}  // namespace mfbai

#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include "mfbai/model.hpp"
#include "mfbai/rng.hpp"
#include "mfbai/transport.hpp"

using namespace mfbai;

namespace {

// Slow independent oracle: direct evaluation of the merged-regime objective
//   sum_k sum_m c_{k,m} [d-(mu, x + xi_m) + d+(mu, x - xi_m)]
// and its minimisation over a uniform grid.
struct GridTerm {
  double c, mu, xi;
};

double grid_objective(const std::vector<GridTerm>& terms,
                      const RewardFamily& family, double x) {
  double sum = 0.0;
  for (const auto& t : terms) {
    if (x <= t.mu - t.xi) {
      sum += t.c * kl(family, t.mu, family.clamp_to_domain(x + t.xi));
    }
    if (x >= t.mu + t.xi) {
      sum += t.c * kl(family, t.mu, family.clamp_to_domain(x - t.xi));
    }
  }
  return sum;
}

struct GridMin {
  double x;
  double value;
};

GridMin grid_minimize(const std::vector<GridTerm>& terms,
                      const RewardFamily& family, double resolution) {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  for (const auto& t : terms) {
    lo = std::min(lo, t.mu - t.xi);
    hi = std::max(hi, t.mu + t.xi);
  }
  lo -= 2.0 * resolution;
  hi += 2.0 * resolution;
  if (family.kind == FamilyKind::bernoulli) {
    lo = std::max(lo, kBernoulliDomainEps);
    hi = std::min(hi, 1.0 - kBernoulliDomainEps);
  }
  GridMin best{lo, grid_objective(terms, family, lo)};
  long n = std::lround((hi - lo) / resolution);
  for (long k = 1; k <= n; ++k) {
    double x = lo + static_cast<double>(k) * resolution;
    double v = grid_objective(terms, family, x);
    if (v < best.value) best = {x, v};
  }
  return best;
}

FidelitySchedule random_schedule(std::size_t M, CounterRng& rng) {
  std::vector<double> xi(M, 0.0);
  for (std::size_t m = 0; m + 1 < M; ++m) xi[m] = 0.02 + 0.3 * rng.next_unit();
  std::sort(xi.begin(), xi.end(), std::greater<>());
  for (std::size_t m = 0; m + 1 < M; ++m) {
    xi[m] += 0.01 * static_cast<double>(M - 1 - m);
  }
  std::vector<double> lambda(M);
  double acc = 0.1 + rng.next_unit();
  for (std::size_t m = 0; m < M; ++m) {
    lambda[m] = acc;
    acc *= 1.2 + 2.0 * rng.next_unit();
  }
  return {xi, lambda};
}

WeightVector random_simplex_weights(std::size_t K, std::size_t M,
                                    CounterRng& rng) {
  std::vector<double> w(K * M);
  double sum = 0.0;
  for (double& v : w) {
    v = -std::log(rng.next_unit());
    sum += v;
  }
  for (double& v : w) v /= sum;
  double s2 = 0.0;
  for (double v : w) s2 += v;
  for (double& v : w) v /= s2;
  return WeightVector::simplex(std::move(w), K, M);
}

}  // namespace

TEST_CASE("solve_psi: bias-consistent row has zero value") {
  auto inst = make_preset("five-by-two");
  std::vector<double> w{0.3, 0.7};
  std::vector<double> mu{0.4, 0.5};
  auto sol = solve_psi(w, mu, inst.schedule, inst.family);
  CHECK(sol.value == 0.0);
  CHECK(sol.psi == doctest::Approx(0.5).epsilon(1e-12));
}

TEST_CASE("solve_psi: single fidelity projects onto the mean") {
  FidelitySchedule sched{{0.0}, {2.0}};
  std::vector<double> w{1.0};
  std::vector<double> mu{0.37};
  auto sol = solve_psi(w, mu, sched, RewardFamily::gaussian(1.0));
  CHECK(sol.psi == doctest::Approx(0.37).epsilon(1e-12));
  CHECK(sol.value == 0.0);
}

TEST_CASE("solve_psi: two-fidelity row agrees with the grid oracle") {
  FidelitySchedule sched{{0.1, 0.0}, {1.0, 1.0}};
  auto fam = RewardFamily::gaussian(1.0);
  std::vector<double> w{0.5, 0.5};
  std::vector<double> mu{0.8, 0.6};
  auto sol = solve_psi(w, mu, sched, fam);
  std::vector<GridTerm> terms{{0.5, 0.8, 0.1}, {0.5, 0.6, 0.0}};
  auto grid = grid_minimize(terms, fam, 1e-5);
  CHECK(sol.value == doctest::Approx(grid.value).epsilon(1e-4));
  CHECK(std::abs(sol.psi - grid.x) < 1e-4);
}

TEST_CASE("solve_psi: rejects malformed weights") {
  FidelitySchedule sched{{0.1, 0.0}, {1.0, 2.0}};
  auto fam = RewardFamily::gaussian(1.0);
  std::vector<double> mu{0.4, 0.5};
  std::vector<double> zeros{0.0, 0.0};
  std::vector<double> negative{0.5, -0.5};
  std::vector<double> short_row{0.5};
  CHECK_THROWS_AS(solve_psi(zeros, mu, sched, fam), std::domain_error);
  CHECK_THROWS_AS(solve_psi(negative, mu, sched, fam), std::domain_error);
  std::vector<double> short_mu{0.4};
  CHECK_THROWS_AS(solve_psi(short_row, short_mu, sched, fam),
                  std::domain_error);
}

TEST_CASE("solve_eta: symmetric single-fidelity pair meets at the midpoint") {
  FidelitySchedule sched{{0.0}, {1.0}};
  auto fam = RewardFamily::gaussian(1.0);
  std::vector<double> wi{0.5}, wj{0.5}, mi{0.6}, mj{0.5};
  auto sol = solve_eta(wi, wj, mi, mj, sched, fam);
  CHECK(sol.eta == doctest::Approx(0.55).epsilon(1e-12));
  CHECK(sol.value == doctest::Approx(0.00125).epsilon(1e-12));
}

TEST_CASE("solve_eta: five-by-two optimal-allocation fixed point") {
  auto inst = make_preset("five-by-two");
  // Closed form for the symmetric reduction: with r = sqrt(0.4), the optimal
  // cost split is w(sub-optimal, cheap) = 1/(4 + 10r) per arm and
  // w(best, top) = 10r/(4 + 10r); the merged minimiser sits at
  // 0.5 + 0.1 r / (1 + r).
  double r = std::sqrt(0.4);
  double w_low = 1.0 / (4.0 + 10.0 * r);
  double w_top = 10.0 * r / (4.0 + 10.0 * r);
  double eta_exact = 0.5 + 0.1 * r / (1.0 + r);

  std::vector<double> w_best{0.0, w_top}, w_sub{w_low, 0.0};
  std::vector<double> mu_best{0.5, 0.6}, mu_sub{0.4, 0.5};
  auto sol =
      solve_eta(w_best, w_sub, mu_best, mu_sub, inst.schedule, inst.family);
  CHECK(sol.eta == doctest::Approx(eta_exact).epsilon(1e-10));
  CHECK(std::abs(sol.eta - 0.539) < 1e-3);

  // Same minimiser from the grid oracle.
  std::vector<GridTerm> terms{{w_top / 5.0, 0.6, 0.0}, {w_low / 0.5, 0.4, 0.1}};
  auto grid = grid_minimize(terms, inst.family, 1e-6);
  CHECK(std::abs(sol.eta - grid.x) < 1e-5);
  CHECK(sol.value == doctest::Approx(grid.value).epsilon(1e-6));
}

TEST_CASE("solve_eta: 50 random pairs match the grid oracle") {
  CounterRng rng(314);
  for (int done = 0; done < 50; ++done) {
    std::size_t M = 1 + rng.next_u64() % 5;
    auto sched = random_schedule(M, rng);
    double sigma2 = 0.1 + 0.9 * rng.next_unit();
    auto fam = RewardFamily::gaussian(sigma2);
    std::vector<double> wi(M), wj(M), mi(M), mj(M);
    for (std::size_t m = 0; m < M; ++m) {
      wi[m] = rng.next_unit();
      wj[m] = rng.next_unit();
      mi[m] = rng.next_unit();
      mj[m] = rng.next_unit();
    }
    auto sol = solve_eta(wi, wj, mi, mj, sched, fam);
    std::vector<GridTerm> terms;
    for (std::size_t m = 0; m < M; ++m) {
      terms.push_back({wi[m] / sched.lambda[m], mi[m], sched.xi[m]});
      terms.push_back({wj[m] / sched.lambda[m], mj[m], sched.xi[m]});
    }
    auto grid = grid_minimize(terms, fam, 1e-5);
    CHECK(sol.value <= grid.value + 1e-12);
    CHECK(sol.value == doctest::Approx(grid.value).epsilon(1e-4));
  }
}

TEST_CASE("transport_pair: beaten arm transports for free") {
  for (const char* name : {"five-by-two", "table-mu1", "lucb-2x2"}) {
    auto inst = make_preset(name);
    std::size_t star = inst.best_arm();
    CounterRng rng(9);
    auto w = random_simplex_weights(inst.arms, inst.fidelities, rng);
    for (std::size_t i = 0; i < inst.arms; ++i) {
      if (i == star) continue;
      auto r =
          transport_pair(w, inst.means, i, star, inst.schedule, inst.family);
      INFO("preset: " << name << ", arm " << i);
      CHECK(r.value == 0.0);
      CHECK(r.regime == TransportRegime::separated);
    }
  }
}

TEST_CASE("transport_pair rejects identical arm indices") {
  auto inst = make_preset("five-by-two");
  auto w = WeightVector::uniform_simplex(5, 2);
  CHECK_THROWS_AS(
      transport_pair(w, inst.means, 2, 2, inst.schedule, inst.family),
      std::invalid_argument);
}

TEST_CASE("transport_pair: single-fidelity midpoint value") {
  BanditInstance inst(2, 1, {0.6, 0.5}, RewardFamily::gaussian(1.0),
                      {{0.0}, {1.0}});
  auto w = WeightVector::simplex({0.5, 0.5}, 2, 1);
  auto r = transport_pair(w, inst.means, 0, 1, inst.schedule, inst.family);
  CHECK(r.value == doctest::Approx(0.00125).epsilon(1e-12));
  CHECK(r.regime == TransportRegime::merged);
  CHECK(r.eta == doctest::Approx(0.55).epsilon(1e-12));
}

TEST_CASE("transport_pair: separated values add the per-arm projections") {
  CounterRng rng(21);
  int separated_seen = 0;
  for (int rep = 0; rep < 2000 && separated_seen < 30; ++rep) {
    std::size_t M = 1 + rng.next_u64() % 4;
    auto sched = random_schedule(M, rng);
    auto fam = RewardFamily::gaussian(0.5);
    std::vector<double> means(2 * M);
    for (double& v : means) v = rng.next_unit();
    auto w = random_simplex_weights(2, M, rng);
    auto r = transport_pair(w, means, 0, 1, sched, fam);
    if (r.regime != TransportRegime::separated) continue;
    ++separated_seen;
    std::span<const double> mspan(means);
    auto pi = solve_psi(std::span<const double>(w.values).subspan(0, M),
                        mspan.subspan(0, M), sched, fam);
    auto pj = solve_psi(std::span<const double>(w.values).subspan(M, M),
                        mspan.subspan(M, M), sched, fam);
    CHECK(r.value == doctest::Approx(pi.value + pj.value).epsilon(1e-12));
    CHECK(r.psi_j > r.psi_i);
  }
  CHECK(separated_seen == 30);
}

TEST_CASE("compare-lb: top-fidelity weights give gap^2 / (4 lambda_top)") {
  auto inst = make_preset("compare-lb(0.2,0.2,1,5)");
  auto w = WeightVector::simplex({0.0, 0.5, 0.0, 0.5}, 2, 2);
  auto bf = big_f(w, inst.means, inst.schedule, inst.family);
  CHECK(bf.value == doctest::Approx(0.2 * 0.2 / (4.0 * 5.0)).epsilon(1e-12));
  CHECK(bf.i == 0);
}

TEST_CASE("big_f: attained at the best arm on bias-consistent instances") {
  CounterRng rng(5);
  for (const char* name : {"five-by-two", "table-mu1", "table-mu2",
                           "table-mu3", "compare-lb"}) {
    auto inst = make_preset(name);
    auto w = random_simplex_weights(inst.arms, inst.fidelities, rng);
    auto bf = big_f(w, inst.means, inst.schedule, inst.family);
    INFO("preset: " << name);
    CHECK(bf.i == inst.best_arm());
    CHECK(bf.value > 0.0);
  }
}

TEST_CASE("big_f: zero when two arms tie at the top fidelity") {
  BanditInstance inst(2, 2, {0.5, 0.6, 0.55, 0.6}, RewardFamily::gaussian(1.0),
                      {{0.1, 0.0}, {1.0, 2.0}});
  auto w = WeightVector::uniform_simplex(2, 2);
  auto bf = big_f(w, inst.means, inst.schedule, inst.family);
  CHECK(bf.value == 0.0);
}

TEST_CASE("big_f is positively homogeneous in the weights") {
  CounterRng rng(77);
  auto inst = make_preset("table-mu2");
  for (int rep = 0; rep < 20; ++rep) {
    auto w = random_simplex_weights(inst.arms, inst.fidelities, rng);
    double scale = 0.1 + 5.0 * rng.next_unit();
    std::vector<double> scaled(w.values);
    for (double& v : scaled) v *= scale;
    auto raw = WeightVector::raw(std::move(scaled), inst.arms, inst.fidelities);
    double v1 = big_f(w, inst.means, inst.schedule, inst.family).value;
    double v2 = big_f(raw, inst.means, inst.schedule, inst.family).value;
    CHECK(v2 == doctest::Approx(scale * v1).epsilon(1e-10));
  }
}

TEST_CASE("big_f is concave along random segments") {
  CounterRng rng(123);
  auto inst = make_preset("five-by-two");
  for (int rep = 0; rep < 100; ++rep) {
    auto w1 = random_simplex_weights(inst.arms, inst.fidelities, rng);
    auto w2 = random_simplex_weights(inst.arms, inst.fidelities, rng);
    std::vector<double> mid(w1.size());
    for (std::size_t k = 0; k < mid.size(); ++k) {
      mid[k] = 0.5 * (w1.values[k] + w2.values[k]);
    }
    double s = 0.0;
    for (double v : mid) s += v;
    for (double& v : mid) v /= s;
    auto wm = WeightVector::simplex(std::move(mid), inst.arms, inst.fidelities);
    double fm = big_f(wm, inst.means, inst.schedule, inst.family).value;
    double f1 = big_f(w1, inst.means, inst.schedule, inst.family).value;
    double f2 = big_f(w2, inst.means, inst.schedule, inst.family).value;
    CHECK(fm >= 0.5 * (f1 + f2) - 1e-12);
  }
}

TEST_CASE("merged minimiser is stable under row permutation") {
  CounterRng rng(31);
  for (int rep = 0; rep < 50; ++rep) {
    std::size_t M = 1 + rng.next_u64() % 4;
    auto sched = random_schedule(M, rng);
    auto fam = RewardFamily::gaussian(1.0);
    std::vector<double> wi(M), wj(M), mi(M), mj(M);
    for (std::size_t m = 0; m < M; ++m) {
      wi[m] = rng.next_unit();
      wj[m] = rng.next_unit();
      mi[m] = rng.next_unit();
      mj[m] = rng.next_unit();
    }
    auto a = solve_eta(wi, wj, mi, mj, sched, fam);
    auto b = solve_eta(wj, wi, mj, mi, sched, fam);
    CHECK(a.eta == doctest::Approx(b.eta).epsilon(1e-12));
    CHECK(a.value == doctest::Approx(b.value).epsilon(1e-12));
  }
}

TEST_CASE("merged minimiser stays between the top-fidelity means") {
  CounterRng rng(63);
  for (const char* name : {"five-by-two", "table-mu1", "table-mu3"}) {
    auto inst = make_preset(name);
    std::size_t star = inst.best_arm();
    std::size_t M = inst.fidelities;
    for (int rep = 0; rep < 20; ++rep) {
      auto w = random_simplex_weights(inst.arms, M, rng);
      for (std::size_t a = 0; a < inst.arms; ++a) {
        if (a == star) continue;
        auto r =
            transport_pair(w, inst.means, star, a, inst.schedule, inst.family);
        if (r.regime != TransportRegime::merged) continue;
        INFO("preset: " << name << " arm " << a);
        CHECK(r.eta >= inst.mean(a, M - 1) - 1e-9);
        CHECK(r.eta <= inst.mean(star, M - 1) + 1e-9);
      }
    }
  }
}

TEST_CASE("minimiser does not depend on the costs") {
  CounterRng rng(99);
  auto inst = make_preset("table-mu1");
  std::size_t M = inst.fidelities;
  for (int rep = 0; rep < 20; ++rep) {
    auto omega = random_simplex_weights(inst.arms, M, rng);
    auto pi = cost_to_pull(omega, inst.schedule);
    auto r_cost =
        transport_pair(omega, inst.means, 3, 0, inst.schedule, inst.family);
    auto r_pull = transport_pair_counts(pi.values, inst.means, 3, 0,
                                        inst.schedule, inst.family);
    REQUIRE(r_cost.regime == r_pull.regime);
    if (r_cost.regime == TransportRegime::merged) {
      CHECK(r_cost.eta == doctest::Approx(r_pull.eta).epsilon(1e-10));
    } else {
      CHECK(r_cost.psi_i == doctest::Approx(r_pull.psi_i).epsilon(1e-10));
      CHECK(r_cost.psi_j == doctest::Approx(r_pull.psi_j).epsilon(1e-10));
    }
  }
}

TEST_CASE("subgradient: beaten-row entries vanish past the merge point") {
  BanditInstance inst(2, 2, {0.7, 0.7, 0.65, 0.6}, RewardFamily::gaussian(1.0),
                      {{0.1, 0.0}, {1.0, 2.0}});
  auto w = WeightVector::uniform_simplex(2, 2);
  auto bf = big_f(w, inst.means, inst.schedule, inst.family);
  REQUIRE(bf.value > 0.0);
  REQUIRE(bf.attaining.regime == TransportRegime::merged);
  // mean(1, 0) + xi_0 = 0.75 >= eta, so the cheap-fidelity entry of the
  // beaten row carries no gradient.
  CHECK(inst.mean(1, 0) + inst.schedule.xi[0] >= bf.attaining.eta);
  auto g = subgradient_f(w, inst.means, inst.schedule, inst.family);
  CHECK(g.values[1 * 2 + 0] == 0.0);
  CHECK(g.values[1 * 2 + 1] > 0.0);
}

TEST_CASE("subgradient: support confined to the attaining rows") {
  CounterRng rng(17);
  auto inst = make_preset("table-mu2");
  std::size_t M = inst.fidelities;
  for (int rep = 0; rep < 50; ++rep) {
    auto w = random_simplex_weights(inst.arms, M, rng);
    auto g = subgradient_f(w, inst.means, inst.schedule, inst.family);
    std::size_t nonzero = 0;
    for (std::size_t a = 0; a < inst.arms; ++a) {
      for (std::size_t m = 0; m < M; ++m) {
        double v = g.values[a * M + m];
        CHECK(v >= 0.0);
        if (v != 0.0) {
          ++nonzero;
          CHECK((a == g.i || a == g.j));
        }
      }
    }
    CHECK(nonzero <= 2 * M);
  }
}

TEST_CASE("subgradient matches directional finite differences") {
  CounterRng rng(253);
  auto inst = make_preset("table-mu1");
  std::size_t M = inst.fidelities;
  std::size_t cells = inst.arms * M;
  int checked = 0;
  while (checked < 50) {
    auto w = random_simplex_weights(inst.arms, M, rng);
    bool interior = true;
    for (double v : w.values) interior = interior && v > 1e-3;
    if (!interior) continue;

    auto bf = big_f(w, inst.means, inst.schedule, inst.family);
    if (!(bf.value > 0.0)) continue;
    // require a uniquely attaining pair with a clear margin
    double runner_up = std::numeric_limits<double>::infinity();
    for (std::size_t j = 0; j < inst.arms; ++j) {
      if (j == bf.i || j == bf.j) continue;
      auto r =
          transport_pair(w, inst.means, bf.i, j, inst.schedule, inst.family);
      runner_up = std::min(runner_up, r.value);
    }
    if (runner_up < bf.value * (1.0 + 1e-3)) continue;

    auto g = subgradient_f(w, inst.means, inst.schedule, inst.family);
    std::vector<double> dir(cells);
    double mean = 0.0;
    for (double& v : dir) {
      v = rng.next_unit() - 0.5;
      mean += v;
    }
    mean /= static_cast<double>(cells);
    for (double& v : dir) v -= mean;

    double h = 1e-6;
    std::vector<double> up(w.values), down(w.values);
    for (std::size_t k = 0; k < cells; ++k) {
      up[k] += h * dir[k];
      down[k] -= h * dir[k];
    }
    auto wu = WeightVector::raw(std::move(up), inst.arms, M);
    auto wd = WeightVector::raw(std::move(down), inst.arms, M);
    double fu = big_f(wu, inst.means, inst.schedule, inst.family).value;
    double fd = big_f(wd, inst.means, inst.schedule, inst.family).value;
    double numeric = (fu - fd) / (2.0 * h);
    double analytic = 0.0;
    for (std::size_t k = 0; k < cells; ++k) analytic += g.values[k] * dir[k];
    CHECK(std::abs(numeric - analytic) < 1e-5);
    ++checked;
  }
}

TEST_CASE("subgradient requires a positive value") {
  BanditInstance inst(2, 1, {0.5, 0.5}, RewardFamily::gaussian(1.0),
                      {{0.0}, {1.0}});
  auto w = WeightVector::uniform_simplex(2, 1);
  CHECK_THROWS_AS(subgradient_f(w, inst.means, inst.schedule, inst.family),
                  std::domain_error);
}

TEST_CASE("glr_matrix: zero counts give zero statistics") {
  auto inst = make_preset("five-by-two");
  auto counts = WeightVector::raw(std::vector<double>(10, 0.0), 5, 2);
  auto stat = glr_matrix(counts, inst.means, inst.schedule, inst.family);
  for (double v : stat) CHECK(v == 0.0);
}

TEST_CASE("glr_matrix: statistics scale linearly with the counts") {
  CounterRng rng(8);
  auto inst = make_preset("table-mu3");
  std::vector<double> n(inst.arms * inst.fidelities);
  for (double& v : n) v = 1.0 + std::floor(20.0 * rng.next_unit());
  std::vector<double> n2(n);
  for (double& v : n2) v *= 2.0;
  auto counts = WeightVector::raw(n, inst.arms, inst.fidelities);
  auto doubled = WeightVector::raw(n2, inst.arms, inst.fidelities);
  auto s1 = glr_matrix(counts, inst.means, inst.schedule, inst.family);
  auto s2 = glr_matrix(doubled, inst.means, inst.schedule, inst.family);
  for (std::size_t k = 0; k < s1.size(); ++k) {
    CHECK(s2[k] == doctest::Approx(2.0 * s1[k]).epsilon(1e-10));
  }
}

TEST_CASE("glr_matrix: two-arm closed form n gap^2 / 4") {
  BanditInstance inst(2, 1, {0.6, 0.5}, RewardFamily::gaussian(1.0),
                      {{0.0}, {1.0}});
  for (double n : {1.0, 8.0, 113.0}) {
    auto counts = WeightVector::raw({n, n}, 2, 1);
    auto stat = glr_matrix(counts, inst.means, inst.schedule, inst.family);
    CHECK(stat[0 * 2 + 1] == doctest::Approx(n * 0.01 / 4.0).epsilon(1e-12));
    std::vector<GridTerm> terms{{n, 0.6, 0.0}, {n, 0.5, 0.0}};
    auto grid = grid_minimize(terms, inst.family, 1e-5);
    CHECK(stat[0 * 2 + 1] == doctest::Approx(grid.value).epsilon(1e-4));
    CHECK(stat[1 * 2 + 0] == 0.0);
    CHECK(stat[0] == 0.0);
  }
}

TEST_CASE("bernoulli pairs agree with the grid oracle") {
  CounterRng rng(404);
  auto fam = RewardFamily::bernoulli();
  for (int rep = 0; rep < 20; ++rep) {
    std::size_t M = 1 + rng.next_u64() % 3;
    auto sched = random_schedule(M, rng);
    std::vector<double> wi(M), wj(M), mi(M), mj(M);
    for (std::size_t m = 0; m < M; ++m) {
      wi[m] = rng.next_unit();
      wj[m] = rng.next_unit();
      mi[m] = 0.05 + 0.9 * rng.next_unit();
      mj[m] = 0.05 + 0.9 * rng.next_unit();
    }
    auto sol = solve_eta(wi, wj, mi, mj, sched, fam);
    std::vector<GridTerm> terms;
    for (std::size_t m = 0; m < M; ++m) {
      terms.push_back({wi[m] / sched.lambda[m], mi[m], sched.xi[m]});
      terms.push_back({wj[m] / sched.lambda[m], mj[m], sched.xi[m]});
    }
    auto grid = grid_minimize(terms, fam, 1e-5);
    CHECK(sol.value <= grid.value + 1e-12);
    CHECK(sol.value == doctest::Approx(grid.value).epsilon(1e-4));
  }
}

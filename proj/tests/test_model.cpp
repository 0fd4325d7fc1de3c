#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <stdexcept>

#include "mfbai/model.hpp"
#include "mfbai/rng.hpp"

using namespace mfbai;

namespace {

std::vector<double> random_simplex(std::size_t n, CounterRng& rng) {
  std::vector<double> w(n);
  double sum = 0.0;
  for (double& v : w) {
    v = -std::log(rng.next_unit());
    sum += v;
  }
  for (double& v : w) v /= sum;
  double s2 = 0.0;
  for (double v : w) s2 += v;
  for (double& v : w) v /= s2;
  return w;
}

}  // namespace

TEST_CASE("preset instances validate") {
  for (const auto& name : {"table-mu1", "table-mu2", "table-mu3",
                           "five-by-two", "lucb-2x2", "compare-lb"}) {
    auto inst = make_preset(name);
    auto report = validate(inst);
    INFO("preset: " << name);
    CHECK(report.ok);
    CHECK(report.is_mf);
    CHECK(report.unique_best);
  }
  CHECK(make_preset("table-mu1").best_arm() == 3);
  CHECK(make_preset("five-by-two").best_arm() == 4);
  CHECK(make_preset("lucb-2x2").best_arm() == 0);
}

TEST_CASE("parametric compare-lb") {
  auto inst = make_preset("compare-lb(0.3,0.3,0.5,4)");
  CHECK(inst.arms == 2);
  CHECK(inst.mean(0, 1) == doctest::Approx(0.15));
  CHECK(inst.mean(0, 0) == doctest::Approx(0.3));
  CHECK(inst.schedule.lambda[1] == 4.0);
  CHECK(validate(inst).is_mf);
  CHECK_THROWS_AS(make_preset("compare-lb(1,2)"), std::invalid_argument);
  CHECK_THROWS_AS(make_preset("no-such-thing"), std::invalid_argument);
}

TEST_CASE("schedule violations reported with indices") {
  BanditInstance bad(2, 2, {0.4, 0.5, 0.3, 0.4}, RewardFamily::gaussian(1.0),
                     {{0.1, 0.01}, {1.0, 2.0}});
  auto report = validate(bad);
  CHECK_FALSE(report.ok);
  REQUIRE_FALSE(report.errors.empty());
  CHECK(report.errors[0].find("xi") != std::string::npos);

  BanditInstance bad_lambda(2, 2, {0.4, 0.5, 0.3, 0.4},
                            RewardFamily::gaussian(1.0),
                            {{0.1, 0.0}, {2.0, 1.0}});
  CHECK_FALSE(validate(bad_lambda).ok);
}

TEST_CASE("bias violation is a warning, not an error") {
  BanditInstance est(2, 2, {0.9, 0.5, 0.3, 0.4}, RewardFamily::gaussian(1.0),
                     {{0.1, 0.0}, {1.0, 2.0}});
  auto report = validate(est);
  CHECK(report.ok);
  CHECK_FALSE(report.is_mf);
  CHECK_FALSE(report.warnings.empty());
}

TEST_CASE("structural errors throw at construction") {
  CHECK_THROWS_AS(BanditInstance(1, 1, {0.5}, RewardFamily::gaussian(1.0),
                                 {{0.0}, {1.0}}),
                  std::invalid_argument);
  CHECK_THROWS_AS(BanditInstance(2, 2, {0.5, 0.5, 0.5},
                                 RewardFamily::gaussian(1.0),
                                 {{0.1, 0.0}, {1.0, 2.0}}),
                  std::invalid_argument);
}

TEST_CASE("cost_to_pull on a single fidelity is the identity") {
  auto omega = WeightVector::simplex({0.3, 0.7}, 2, 1);
  auto pi = cost_to_pull(omega, {{0.0}, {3.0}});
  CHECK(pi(0, 0) == doctest::Approx(0.3).epsilon(1e-12));
  CHECK(pi(1, 0) == doctest::Approx(0.7).epsilon(1e-12));
}

TEST_CASE("cost_to_pull divides by the fidelity costs") {
  auto omega = WeightVector::uniform_simplex(2, 2);
  auto pi = cost_to_pull(omega, {{0.1, 0.0}, {1.0, 2.0}});
  CHECK(pi(0, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(pi(0, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
  CHECK(pi(1, 0) == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  CHECK(pi(1, 1) == doctest::Approx(1.0 / 6.0).epsilon(1e-12));
}

TEST_CASE("cost/pull maps are mutually inverse and preserve zeros") {
  CounterRng rng(11);
  FidelitySchedule schedule{{0.2, 0.05, 0.0}, {0.5, 1.0, 4.0}};
  for (int rep = 0; rep < 100; ++rep) {
    auto w = random_simplex(9, rng);
    if (rep % 3 == 0) {
      // plant zeros, renormalise
      w[rep % 9] = 0.0;
      double s = 0.0;
      for (double v : w) s += v;
      for (double& v : w) v /= s;
    }
    auto omega = WeightVector::simplex(w, 3, 3);
    auto pi = cost_to_pull(omega, schedule);
    auto back = pull_to_cost(pi, schedule);
    for (std::size_t k = 0; k < 9; ++k) {
      CHECK(back.values[k] == doctest::Approx(omega.values[k]).epsilon(1e-12));
      CHECK((omega.values[k] == 0.0) == (pi.values[k] == 0.0));
    }
  }
}

TEST_CASE("weight vector invariants enforced") {
  CHECK_THROWS_AS(WeightVector::simplex({0.5, 0.6}, 2, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(WeightVector::simplex({-0.5, 1.5}, 2, 1),
                  std::invalid_argument);
  CHECK_THROWS_AS(WeightVector::raw({1.0, -2.0}, 2, 1), std::invalid_argument);
  CHECK_NOTHROW(WeightVector::raw({5.0, 0.0}, 2, 1));
}

TEST_CASE("instance json round trip") {
  auto inst = make_preset("table-mu1");
  auto text = instance_to_json(inst);
  auto parsed = instance_from_json(text);
  CHECK(parsed.arms == inst.arms);
  CHECK(parsed.fidelities == inst.fidelities);
  CHECK(parsed.means == inst.means);
  CHECK(parsed.schedule.xi == inst.schedule.xi);
  CHECK(parsed.schedule.lambda == inst.schedule.lambda);
  CHECK(parsed.family.sigma2 == inst.family.sigma2);

  auto path = std::filesystem::temp_directory_path() / "mfbai_inst_test.json";
  save_instance(inst, path.string());
  auto loaded = load_instance(path.string());
  CHECK(loaded.means == inst.means);
  CHECK(resolve_instance(path.string()).means == inst.means);
  std::filesystem::remove(path);

  auto ber = BanditInstance(2, 1, {0.3, 0.6}, RewardFamily::bernoulli(),
                            {{0.0}, {1.0}});
  auto round = instance_from_json(instance_to_json(ber));
  CHECK(round.family.kind == FamilyKind::bernoulli);
}

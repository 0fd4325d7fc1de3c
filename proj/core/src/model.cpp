#include "mfbai/model.hpp"

#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include <json.hpp>

namespace mfbai {
namespace {

constexpr double kSimplexTol = 1e-12;
constexpr double kBiasTol = 1e-12;

std::string cell(std::size_t a, std::size_t m) {
  std::ostringstream os;
  os << "(arm " << a << ", fidelity " << m << ")";
  return os.str();
}

}  // namespace

BanditInstance::BanditInstance(std::size_t arms_, std::size_t fidelities_,
                               std::vector<double> means_,
                               RewardFamily family_, FidelitySchedule schedule_)
    : arms(arms_),
      fidelities(fidelities_),
      means(std::move(means_)),
      family(family_),
      schedule(std::move(schedule_)) {
  if (arms < 2) throw std::invalid_argument("instance needs at least 2 arms");
  if (fidelities < 1) {
    throw std::invalid_argument("instance needs at least 1 fidelity");
  }
  if (means.size() != arms * fidelities) {
    throw std::invalid_argument("mean matrix does not match K x M");
  }
  if (schedule.xi.size() != fidelities ||
      schedule.lambda.size() != fidelities) {
    throw std::invalid_argument("schedule does not match fidelity count");
  }
}

std::size_t BanditInstance::best_arm() const {
  std::size_t best = 0;
  for (std::size_t a = 1; a < arms; ++a) {
    if (mean(a, fidelities - 1) > mean(best, fidelities - 1)) best = a;
  }
  return best;
}

bool BanditInstance::has_unique_best() const {
  std::size_t star = best_arm();
  double top = mean(star, fidelities - 1);
  for (std::size_t a = 0; a < arms; ++a) {
    if (a != star && mean(a, fidelities - 1) == top) return false;
  }
  return true;
}

bool BanditInstance::satisfies_mf() const {
  for (std::size_t a = 0; a < arms; ++a) {
    double top = mean(a, fidelities - 1);
    for (std::size_t m = 0; m < fidelities; ++m) {
      if (std::abs(mean(a, m) - top) > schedule.xi[m] + kBiasTol) return false;
    }
  }
  return true;
}

ValidationReport validate(const BanditInstance& instance) {
  ValidationReport report;
  const auto& xi = instance.schedule.xi;
  const auto& lambda = instance.schedule.lambda;
  std::size_t M = instance.fidelities;

  for (std::size_t m = 0; m + 1 < M; ++m) {
    if (!(xi[m] > xi[m + 1])) {
      report.errors.push_back("schedule: xi not strictly decreasing at index " +
                              std::to_string(m));
    }
    if (!(lambda[m] < lambda[m + 1])) {
      report.errors.push_back(
          "schedule: lambda not strictly increasing at index " +
          std::to_string(m));
    }
  }
  if (xi.back() != 0.0) {
    report.errors.push_back("schedule: top-fidelity xi must be exactly 0");
  }
  for (std::size_t m = 0; m < M; ++m) {
    if (!(lambda[m] > 0.0)) {
      report.errors.push_back("schedule: lambda must be positive at index " +
                              std::to_string(m));
    }
    if (xi[m] < 0.0) {
      report.errors.push_back("schedule: xi must be nonnegative at index " +
                              std::to_string(m));
    }
  }

  for (std::size_t a = 0; a < instance.arms; ++a) {
    for (std::size_t m = 0; m < M; ++m) {
      if (!instance.family.in_domain(instance.mean(a, m))) {
        report.errors.push_back("mean outside family domain at " + cell(a, m));
      }
    }
  }

  report.is_mf = true;
  for (std::size_t a = 0; a < instance.arms; ++a) {
    double top = instance.mean(a, M - 1);
    for (std::size_t m = 0; m < M; ++m) {
      if (std::abs(instance.mean(a, m) - top) > xi[m] + kBiasTol) {
        report.is_mf = false;
        report.warnings.push_back("bias constraint violated at " + cell(a, m));
      }
    }
  }

  report.unique_best = instance.has_unique_best();
  if (!report.unique_best) {
    report.warnings.push_back("best arm at the top fidelity is not unique");
  }

  report.ok = report.errors.empty();
  return report;
}

WeightVector WeightVector::simplex(std::vector<double> values,
                                   std::size_t arms, std::size_t fidelities) {
  if (values.size() != arms * fidelities) {
    throw std::invalid_argument("weight vector does not match K x M");
  }
  double sum = 0.0;
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("simplex weights must be finite and >= 0");
    }
    sum += v;
  }
  if (std::abs(sum - 1.0) > kSimplexTol) {
    throw std::invalid_argument("simplex weights must sum to 1");
  }
  WeightVector w;
  w.values = std::move(values);
  w.arms = arms;
  w.fidelities = fidelities;
  w.normalization = Normalization::simplex;
  return w;
}

WeightVector WeightVector::raw(std::vector<double> values, std::size_t arms,
                               std::size_t fidelities) {
  if (values.size() != arms * fidelities) {
    throw std::invalid_argument("weight vector does not match K x M");
  }
  for (double v : values) {
    if (!(v >= 0.0) || !std::isfinite(v)) {
      throw std::invalid_argument("raw weights must be finite and >= 0");
    }
  }
  WeightVector w;
  w.values = std::move(values);
  w.arms = arms;
  w.fidelities = fidelities;
  w.normalization = Normalization::raw;
  return w;
}

WeightVector WeightVector::uniform_simplex(std::size_t arms,
                                           std::size_t fidelities) {
  std::vector<double> v(arms * fidelities,
                        1.0 / static_cast<double>(arms * fidelities));
  return simplex(std::move(v), arms, fidelities);
}

WeightVector cost_to_pull(const WeightVector& omega,
                          const FidelitySchedule& schedule) {
  if (omega.normalization != Normalization::simplex) {
    throw std::invalid_argument("cost_to_pull expects a simplex point");
  }
  std::vector<double> pi(omega.size());
  double denom = 0.0;
  for (std::size_t a = 0; a < omega.arms; ++a) {
    for (std::size_t m = 0; m < omega.fidelities; ++m) {
      double v = omega(a, m) / schedule.lambda[m];
      pi[a * omega.fidelities + m] = v;
      denom += v;
    }
  }
  for (double& v : pi) v /= denom;
  return WeightVector::simplex(std::move(pi), omega.arms, omega.fidelities);
}

WeightVector pull_to_cost(const WeightVector& pi,
                          const FidelitySchedule& schedule) {
  if (pi.normalization != Normalization::simplex) {
    throw std::invalid_argument("pull_to_cost expects a simplex point");
  }
  std::vector<double> omega(pi.size());
  double denom = 0.0;
  for (std::size_t a = 0; a < pi.arms; ++a) {
    for (std::size_t m = 0; m < pi.fidelities; ++m) {
      double v = schedule.lambda[m] * pi(a, m);
      omega[a * pi.fidelities + m] = v;
      denom += v;
    }
  }
  for (double& v : omega) v /= denom;
  return WeightVector::simplex(std::move(omega), pi.arms, pi.fidelities);
}

std::string instance_to_json(const BanditInstance& instance) {
  nlohmann::json j;
  j["K"] = instance.arms;
  j["M"] = instance.fidelities;
  nlohmann::json fam;
  if (instance.family.kind == FamilyKind::gaussian_known_variance) {
    fam["kind"] = "gaussian-known-variance";
    fam["sigma2"] = instance.family.sigma2;
  } else {
    fam["kind"] = "bernoulli";
  }
  j["family"] = fam;
  j["xi"] = instance.schedule.xi;
  j["lambda"] = instance.schedule.lambda;
  nlohmann::json mu = nlohmann::json::array();
  for (std::size_t a = 0; a < instance.arms; ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t m = 0; m < instance.fidelities; ++m) {
      row.push_back(instance.mean(a, m));
    }
    mu.push_back(row);
  }
  j["mu"] = mu;
  return j.dump(2);
}

BanditInstance instance_from_json(const std::string& text) {
  nlohmann::json j = nlohmann::json::parse(text);
  std::size_t K = j.at("K").get<std::size_t>();
  std::size_t M = j.at("M").get<std::size_t>();
  RewardFamily family;
  std::string kind = j.at("family").at("kind").get<std::string>();
  if (kind == "gaussian-known-variance") {
    family = RewardFamily::gaussian(j.at("family").at("sigma2").get<double>());
  } else if (kind == "bernoulli") {
    family = RewardFamily::bernoulli();
  } else {
    throw std::invalid_argument("unknown family kind: " + kind);
  }
  FidelitySchedule schedule;
  schedule.xi = j.at("xi").get<std::vector<double>>();
  schedule.lambda = j.at("lambda").get<std::vector<double>>();
  auto mu = j.at("mu");
  if (mu.size() != K) throw std::invalid_argument("mu must have K rows");
  std::vector<double> means;
  means.reserve(K * M);
  for (const auto& row : mu) {
    if (row.size() != M) throw std::invalid_argument("mu row must have M entries");
    for (const auto& v : row) means.push_back(v.get<double>());
  }
  return BanditInstance(K, M, std::move(means), family, std::move(schedule));
}

BanditInstance load_instance(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open instance file: " + path);
  std::stringstream buffer;
  buffer << in.rdbuf();
  return instance_from_json(buffer.str());
}

void save_instance(const BanditInstance& instance, const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write instance file: " + path);
  out << instance_to_json(instance) << "\n";
}

}  // namespace mfbai

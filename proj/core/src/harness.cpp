#include "mfbai/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include <json.hpp>

namespace mfbai {
namespace {

double quantile(std::vector<double> sorted, double q) {
  if (sorted.empty()) return 0.0;
  double pos = q * static_cast<double>(sorted.size() - 1);
  std::size_t lo = static_cast<std::size_t>(pos);
  std::size_t hi = std::min(lo + 1, sorted.size() - 1);
  double frac = pos - static_cast<double>(lo);
  return sorted[lo] * (1.0 - frac) + sorted[hi] * frac;
}

double exact_total_cost(const AlgoState& s, const FidelitySchedule& schedule) {
  double total = 0.0;
  for (std::size_t a = 0; a < s.arms; ++a) {
    for (std::size_t m = 0; m < s.fidelities; ++m) {
      total += schedule.lambda[m] * s.counts[a * s.fidelities + m];
    }
  }
  return total;
}

RunRecord run_gradient_trial(const ExperimentSpec& spec,
                             std::size_t trial_index, CounterRng& rng) {
  bool restricted = spec.algo == AlgoKind::grad;
  BanditInstance instance = restricted
                                ? restrict_to_top_fidelity(spec.instance)
                                : spec.instance;
  MfGradConfig config = spec.config;
  config.delta = spec.delta;
  if (spec.algo == AlgoKind::mfgrad_const) {
    config.learning_rate_mode = LearningRateMode::constant_rate;
  }

  RunRecord record;
  record.algo = algo_name(spec.algo);
  record.seed = spec.seed;
  record.trial = trial_index;

  AlgoState state = mfgrad_init(instance, rng);
  std::size_t init_pulls = state.t;
  while (true) {
    if (state.t >= spec.max_steps ||
        (spec.max_cost > 0.0 &&
         exact_total_cost(state, instance.schedule) >= spec.max_cost)) {
      record.stopped = false;
      record.forced = true;
      record.recommendation =
          big_f_counts(state.counts, state.hat_mu, instance.schedule,
                       instance.family)
              .i;
      break;
    }
    if (spec.use_stopping_rule) {
      StopDecision decision = mfgrad_should_stop(state, config, instance);
      if (decision.stop) {
        record.stopped = true;
        record.recommendation = decision.recommendation;
        break;
      }
    }
    mfgrad_step(state, config, instance, rng);
    if (spec.trajectory_stride > 0 && state.t > init_pulls &&
        state.t % spec.trajectory_stride == 0) {
      record.trajectory.emplace_back(state.t, state.cost_proportions());
    }
  }
  record.tau = state.t;
  record.total_cost = exact_total_cost(state, instance.schedule);
  record.correct = record.recommendation == spec.instance.best_arm();
  return record;
}

RunRecord run_lucb_trial(const ExperimentSpec& spec, std::size_t trial_index,
                         CounterRng& rng) {
  LucbOracleConfig config = spec.lucb;
  config.delta = spec.delta;
  config.max_steps = std::min(config.max_steps, spec.max_steps);
  LucbResult result = lucb_oracle_demo(spec.instance, config, rng);

  RunRecord record;
  record.algo = algo_name(spec.algo);
  record.seed = spec.seed;
  record.trial = trial_index;
  record.stopped = result.stopped;
  record.forced = !result.stopped;
  record.tau = result.steps;
  record.total_cost = result.total_cost;
  record.recommendation = result.recommendation;
  record.correct = result.recommendation == spec.instance.best_arm();
  return record;
}

}  // namespace

double sample_reward(const BanditInstance& instance, std::size_t arm,
                     std::size_t fid, CounterRng& rng) {
  double mean = instance.mean(arm, fid);
  if (instance.family.kind == FamilyKind::gaussian_known_variance) {
    return rng.next_gaussian(mean, instance.family.sigma2);
  }
  return rng.next_bernoulli(mean) ? 1.0 : 0.0;
}

std::string algo_name(AlgoKind kind) {
  switch (kind) {
    case AlgoKind::mfgrad: return "mfgrad";
    case AlgoKind::mfgrad_const: return "mfgrad-const";
    case AlgoKind::grad: return "grad";
    case AlgoKind::lucb_oracle: return "lucb-oracle";
  }
  throw std::logic_error("unreachable");
}

AlgoKind algo_from_name(const std::string& name) {
  if (name == "mfgrad") return AlgoKind::mfgrad;
  if (name == "mfgrad-const") return AlgoKind::mfgrad_const;
  if (name == "grad") return AlgoKind::grad;
  if (name == "lucb-oracle") return AlgoKind::lucb_oracle;
  throw std::invalid_argument("unknown algorithm: " + name);
}

RunRecord run_trial(const ExperimentSpec& spec, std::size_t trial_index) {
  CounterRng rng = CounterRng::for_stream(spec.seed, trial_index);
  if (spec.algo == AlgoKind::lucb_oracle) {
    return run_lucb_trial(spec, trial_index, rng);
  }
  return run_gradient_trial(spec, trial_index, rng);
}

BatchSummary summarize(const std::vector<RunRecord>& records) {
  BatchSummary summary;
  summary.trials = records.size();
  if (records.empty()) return summary;
  std::vector<double> costs;
  costs.reserve(records.size());
  double mean = 0.0;
  std::size_t errors = 0;
  for (const RunRecord& r : records) {
    costs.push_back(r.total_cost);
    mean += r.total_cost;
    if (!r.correct) ++errors;
    if (!r.stopped) ++summary.unstopped;
  }
  std::sort(costs.begin(), costs.end());
  summary.mean_cost = mean / static_cast<double>(records.size());
  summary.median_cost = quantile(costs, 0.5);
  summary.q1_cost = quantile(costs, 0.25);
  summary.q3_cost = quantile(costs, 0.75);
  summary.error_rate =
      static_cast<double>(errors) / static_cast<double>(records.size());
  return summary;
}

BatchResult run_batch(const ExperimentSpec& spec, std::size_t threads) {
  BatchResult result;
  result.records.resize(spec.trials);
  if (threads == 0) {
    threads = std::max<std::size_t>(1, std::thread::hardware_concurrency());
  }
  threads = std::min(threads, spec.trials);

  if (threads <= 1) {
    for (std::size_t i = 0; i < spec.trials; ++i) {
      result.records[i] = run_trial(spec, i);
    }
  } else {
    std::atomic<std::size_t> next{0};
    auto worker = [&]() {
      while (true) {
        std::size_t i = next.fetch_add(1);
        if (i >= spec.trials) break;
        result.records[i] = run_trial(spec, i);
      }
    };
    std::vector<std::thread> pool;
    pool.reserve(threads);
    for (std::size_t w = 0; w < threads; ++w) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  result.summary = summarize(result.records);
  return result;
}

BanditInstance random_instance_gen(std::size_t arms, std::size_t fidelities,
                                   const std::vector<double>& a,
                                   const std::vector<double>& b,
                                   double min_gap, std::uint64_t seed,
                                   const std::vector<double>& lambda,
                                   double sigma2) {
  if (a.size() != fidelities || b.size() != fidelities ||
      lambda.size() != fidelities) {
    throw std::invalid_argument("spread/cost vectors must have M entries");
  }
  for (std::size_t m = 0; m + 1 < fidelities; ++m) {
    if (a[m] < a[m + 1] || b[m] < b[m + 1]) {
      throw std::invalid_argument("spread vectors must be nonincreasing");
    }
  }
  if (a.back() != 0.0 || b.back() != 0.0) {
    throw std::invalid_argument("spread vectors must end at zero");
  }

  CounterRng rng = CounterRng::for_stream(seed, 0);
  std::vector<double> top(arms);
  bool found = false;
  for (int attempt = 0; attempt < 10000 && !found; ++attempt) {
    for (double& v : top) v = rng.next_unit();
    found = true;
    for (std::size_t i = 0; i < arms && found; ++i) {
      for (std::size_t j = i + 1; j < arms; ++j) {
        if (std::abs(top[i] - top[j]) < min_gap) {
          found = false;
          break;
        }
      }
    }
  }
  if (!found) {
    throw std::runtime_error(
        "could not satisfy the minimum top-fidelity gap; lower min_gap");
  }

  std::vector<double> xi(fidelities);
  for (std::size_t m = 0; m < fidelities; ++m) xi[m] = a[m] + b[m] / 2.0;

  std::vector<double> means(arms * fidelities);
  for (std::size_t i = 0; i < arms; ++i) {
    for (std::size_t m = 0; m + 1 < fidelities; ++m) {
      double spread = a[m] + b[m] / 2.0;
      means[i * fidelities + m] =
          top[i] - spread + 2.0 * spread * rng.next_unit();
    }
    means[i * fidelities + fidelities - 1] = top[i];
  }

  BanditInstance instance(arms, fidelities, std::move(means),
                          RewardFamily::gaussian(sigma2),
                          {std::move(xi), lambda});
  ValidationReport report = validate(instance);
  if (!report.ok) {
    std::string what = "generated instance is invalid:";
    for (const auto& e : report.errors) what += " " + e + ";";
    throw std::invalid_argument(what);
  }
  return instance;
}

void write_records_csv(const std::string& path,
                       const std::vector<RunRecord>& records) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "algo,seed,trial,stopped,tau,total_cost,recommendation,correct\n";
  char buffer[64];
  for (const RunRecord& r : records) {
    std::snprintf(buffer, sizeof buffer, "%.17g", r.total_cost);
    out << r.algo << ',' << r.seed << ',' << r.trial << ','
        << (r.stopped ? 1 : 0) << ',' << r.tau << ',' << buffer << ','
        << r.recommendation << ',' << (r.correct ? 1 : 0) << '\n';
  }
}

std::vector<RunRecord> read_records_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open " + path);
  std::string line;
  std::getline(in, line);  // header
  std::vector<RunRecord> records;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    RunRecord r;
    std::getline(ss, r.algo, ',');
    std::getline(ss, field, ',');
    r.seed = std::stoull(field);
    std::getline(ss, field, ',');
    r.trial = std::stoul(field);
    std::getline(ss, field, ',');
    r.stopped = field == "1";
    std::getline(ss, field, ',');
    r.tau = std::stoul(field);
    std::getline(ss, field, ',');
    r.total_cost = std::stod(field);
    std::getline(ss, field, ',');
    r.recommendation = std::stoul(field);
    std::getline(ss, field, ',');
    r.correct = field == "1";
    r.forced = !r.stopped;
    records.push_back(std::move(r));
  }
  return records;
}

void write_trajectory_csv(const std::string& path, const RunRecord& record,
                          std::size_t arms, std::size_t fidelities) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write " + path);
  out << "t";
  for (std::size_t a = 1; a <= arms; ++a) {
    for (std::size_t m = 1; m <= fidelities; ++m) {
      out << ",omega_" << a << "_" << m;
    }
  }
  out << '\n';
  char buffer[64];
  for (const auto& [t, omega] : record.trajectory) {
    out << t;
    for (double v : omega) {
      std::snprintf(buffer, sizeof buffer, "%.17g", v);
      out << ',' << buffer;
    }
    out << '\n';
  }
}

std::string summary_to_json(const ExperimentSpec& spec,
                            const BatchSummary& summary) {
  nlohmann::json j;
  j["algo"] = algo_name(spec.algo);
  j["delta"] = spec.delta;
  j["seed"] = spec.seed;
  j["trials"] = summary.trials;
  j["mean_cost"] = summary.mean_cost;
  j["median_cost"] = summary.median_cost;
  j["q1_cost"] = summary.q1_cost;
  j["q3_cost"] = summary.q3_cost;
  j["error_rate"] = summary.error_rate;
  j["unstopped"] = summary.unstopped;
  return j.dump(2);
}

std::vector<DemoRun> make_demo(const std::string& name,
                               std::size_t trials_override) {
  auto gradient_pair = [&](const std::string& preset, double delta,
                           std::size_t trials) {
    std::vector<DemoRun> runs;
    for (AlgoKind kind : {AlgoKind::mfgrad, AlgoKind::grad}) {
      ExperimentSpec spec;
      spec.instance = make_preset(preset);
      spec.algo = kind;
      spec.delta = delta;
      spec.trials = trials_override ? trials_override : trials;
      spec.seed = 1;
      spec.max_steps = 2000000;
      runs.push_back({algo_name(kind), spec});
    }
    return runs;
  };

  if (name == "fig1") return gradient_pair("table-mu1", 0.01, 1000);
  if (name == "fig2") return gradient_pair("five-by-two", 0.01, 1000);
  if (name == "fig3") {
    ExperimentSpec spec;
    spec.instance = make_preset("five-by-two");
    spec.algo = AlgoKind::mfgrad;
    spec.delta = 0.01;
    spec.trials = trials_override ? trials_override : 100;
    spec.seed = 1;
    spec.max_steps = 100000;
    spec.trajectory_stride = 100;
    spec.use_stopping_rule = false;
    return {{"mfgrad-trajectory", spec}};
  }
  if (name == "lucb-bug") {
    std::vector<DemoRun> runs;
    for (std::size_t fid : {std::size_t{0}, std::size_t{1}}) {
      ExperimentSpec spec;
      spec.instance = make_preset("lucb-2x2");
      spec.algo = AlgoKind::lucb_oracle;
      spec.delta = 0.01;
      spec.trials = trials_override ? trials_override : 50;
      spec.seed = 1;
      spec.max_steps = 1000000;
      spec.lucb.target_fidelities = {fid, fid};
      runs.push_back(
          {fid == 0 ? "lucb-oracle-cheap" : "lucb-oracle-top", spec});
    }
    return runs;
  }
  throw std::invalid_argument("unknown demo: " + name);
}

std::vector<std::string> demo_names() {
  return {"fig1", "fig2", "fig3", "lucb-bug"};
}

}  // namespace mfbai

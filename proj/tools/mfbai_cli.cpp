#include <cstdio>
#include <exception>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "mfbai/harness.hpp"
#include "mfbai/model.hpp"
#include "mfbai/oracle.hpp"

namespace fs = std::filesystem;
using namespace mfbai;

namespace {

nlohmann::json grid_json(const std::vector<double>& values, std::size_t arms,
                         std::size_t fids) {
  nlohmann::json rows = nlohmann::json::array();
  for (std::size_t a = 0; a < arms; ++a) {
    nlohmann::json row = nlohmann::json::array();
    for (std::size_t m = 0; m < fids; ++m) row.push_back(values[a * fids + m]);
    rows.push_back(row);
  }
  return rows;
}

int run_oracle(const std::string& instance_ref, std::size_t iters,
               double alpha0, std::uint64_t seed, const std::string& out) {
  BanditInstance instance = resolve_instance(instance_ref);
  auto report = validate(instance);
  if (!report.ok) {
    for (const auto& e : report.errors) std::cerr << "error: " << e << "\n";
    return 1;
  }
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << "\n";

  OracleOptions options;
  if (iters > 0) options.iterations = iters;
  if (alpha0 > 0) options.alpha0 = alpha0;
  options.seed = seed;
  auto sol = solve_oracle(instance, options);

  nlohmann::json j;
  j["instance"] = instance_ref;
  j["omega_star"] =
      grid_json(sol.omega_star.values, instance.arms, instance.fidelities);
  j["f_star"] = sol.f_star;
  j["c_star"] = 1.0 / sol.f_star;
  j["iterations"] = sol.iterations;
  j["stationarity_gap"] = sol.stationarity_gap;

  std::size_t star = instance.best_arm();
  nlohmann::json pair_costs = nlohmann::json::array();
  for (std::size_t a = 0; a < instance.arms; ++a) {
    if (a == star) continue;
    auto r = transport_pair(sol.omega_star, instance.means, star, a,
                            instance.schedule, instance.family);
    nlohmann::json entry;
    entry["competitor"] = a + 1;
    entry["value"] = r.value;
    entry["regime"] =
        r.regime == TransportRegime::merged ? "merged" : "separated";
    if (r.regime == TransportRegime::merged) entry["eta"] = r.eta;
    pair_costs.push_back(entry);
  }
  j["per_pair_costs"] = pair_costs;

  if (report.is_mf && report.unique_best) {
    auto mask = zero_weight_mask(instance);
    nlohmann::json mask_rows = nlohmann::json::array();
    for (std::size_t a = 0; a < instance.arms; ++a) {
      nlohmann::json row = nlohmann::json::array();
      for (std::size_t m = 0; m < instance.fidelities; ++m) {
        row.push_back(static_cast<bool>(mask[a * instance.fidelities + m]));
      }
      mask_rows.push_back(row);
    }
    j["mask"] = mask_rows;
  } else {
    j["mask"] = nullptr;
  }

  std::ofstream os(out);
  if (!os) {
    std::cerr << "error: cannot write " << out << "\n";
    return 1;
  }
  os << j.dump(2) << "\n";
  std::cout << "f_star = " << sol.f_star << "  (c_star = " << 1.0 / sol.f_star
            << ")\n";
  return 0;
}

void write_run_outputs(const ExperimentSpec& spec, const BatchResult& batch,
                       const fs::path& dir) {
  fs::create_directories(dir);
  write_records_csv((dir / "records.csv").string(), batch.records);
  std::ofstream summary(dir / "summary.json");
  summary << summary_to_json(spec, batch.summary) << "\n";
  if (spec.trajectory_stride > 0) {
    // the top-fidelity baseline runs on the restricted K x 1 view
    std::size_t fids =
        spec.algo == AlgoKind::grad ? 1 : spec.instance.fidelities;
    for (const auto& record : batch.records) {
      auto name = "trajectory_" + std::to_string(record.trial) + ".csv";
      write_trajectory_csv((dir / name).string(), record, spec.instance.arms,
                           fids);
    }
  }
  std::cout << algo_name(spec.algo) << ": " << batch.summary.trials
            << " trials, median cost " << batch.summary.median_cost
            << ", error rate " << batch.summary.error_rate << ", unstopped "
            << batch.summary.unstopped << " -> " << dir.string() << "\n";
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Multi-fidelity fixed-confidence best-arm identification"};
  app.require_subcommand(1);

  // oracle
  auto* oracle_cmd = app.add_subcommand(
      "oracle", "Solve the optimal cost-proportion program for an instance");
  std::string oracle_instance;
  std::string oracle_out = "oracle.json";
  std::size_t oracle_iters = 0;
  double oracle_alpha0 = 0.0;
  std::uint64_t oracle_seed = 0;
  oracle_cmd->add_option("--instance", oracle_instance,
                         "Instance JSON path or preset name")
      ->required();
  oracle_cmd->add_option("--iters", oracle_iters, "Ascent iterations");
  oracle_cmd->add_option("--alpha0", oracle_alpha0, "Step-size scale");
  oracle_cmd->add_option("--seed", oracle_seed, "Seed (reserved)");
  oracle_cmd->add_option("--out", oracle_out, "Output JSON path");

  // run
  auto* run_cmd =
      app.add_subcommand("run", "Run identification trials on an instance");
  std::string run_instance, run_algo = "mfgrad", run_out = "out";
  double run_delta = 0.1;
  std::size_t run_trials = 1;
  std::uint64_t run_seed = 0;
  std::size_t run_max_steps = 1000000;
  std::size_t run_stride = 0;
  bool run_no_stop = false;
  std::size_t run_threads = 0;
  std::size_t lucb_fidelity = 1;  // 1-based
  double lucb_scale = 1.0;
  run_cmd->add_option("--instance", run_instance,
                      "Instance JSON path or preset name")
      ->required();
  run_cmd->add_option("--algo", run_algo,
                      "mfgrad | mfgrad-const | grad | lucb-oracle");
  run_cmd->add_option("--delta", run_delta, "Risk parameter in (0,1)");
  run_cmd->add_option("--trials", run_trials, "Number of independent trials");
  run_cmd->add_option("--seed", run_seed, "Base seed");
  run_cmd->add_option("--max-steps", run_max_steps, "Per-trial pull budget");
  run_cmd->add_option("--trajectory-stride", run_stride,
                      "Snapshot the cost proportions every k pulls");
  run_cmd->add_flag("--no-stop", run_no_stop,
                    "Disable the stopping rule (run to the budget)");
  run_cmd->add_option("--threads", run_threads, "Worker threads (0 = auto)");
  run_cmd->add_option("--target-fidelity", lucb_fidelity,
                      "lucb-oracle: fidelity to lock (1-based)");
  run_cmd->add_option("--lucb-L", lucb_scale, "lucb-oracle: bonus scale L");
  std::string run_threshold = "simplified";
  double run_c_tilde = 0.0;
  run_cmd->add_option("--threshold", run_threshold,
                      "Stopping threshold: simplified | theoretical");
  run_cmd->add_option("--c-tilde", run_c_tilde,
                      "Additive constant of the theoretical threshold");
  run_cmd->add_option("--out", run_out, "Output directory");

  // demo
  auto* demo_cmd =
      app.add_subcommand("demo", "Run a shipped experiment preset");
  std::string demo_name;
  std::string demo_out = "out";
  std::size_t demo_trials = 0;
  std::size_t demo_threads = 0;
  demo_cmd->add_option("name", demo_name, "fig1 | fig2 | fig3 | lucb-bug")
      ->required();
  demo_cmd->add_option("--out", demo_out, "Output directory");
  demo_cmd->add_option("--trials", demo_trials, "Override the trial count");
  demo_cmd->add_option("--threads", demo_threads, "Worker threads (0 = auto)");

  // gen
  auto* gen_cmd = app.add_subcommand(
      "gen", "Generate a random bias-consistent Gaussian instance");
  std::size_t gen_k = 4, gen_m = 5;
  std::vector<double> gen_a, gen_b, gen_lambda;
  double gen_min_gap = 0.1, gen_sigma2 = 0.1;
  std::uint64_t gen_seed = 0;
  std::string gen_out = "instance.json";
  gen_cmd->add_option("--K", gen_k, "Number of arms")->required();
  gen_cmd->add_option("--M", gen_m, "Number of fidelities")->required();
  gen_cmd->add_option("--a", gen_a, "Spread vector a (M entries)")
      ->required()
      ->expected(-1);
  gen_cmd->add_option("--b", gen_b, "Spread vector b (M entries)")
      ->required()
      ->expected(-1);
  gen_cmd->add_option("--lambda", gen_lambda, "Cost ladder (M entries)")
      ->required()
      ->expected(-1);
  gen_cmd->add_option("--min-gap", gen_min_gap, "Minimum top-fidelity gap");
  gen_cmd->add_option("--sigma2", gen_sigma2, "Gaussian variance");
  gen_cmd->add_option("--seed", gen_seed, "Seed");
  gen_cmd->add_option("--out", gen_out, "Output JSON path");

  CLI11_PARSE(app, argc, argv);

  try {
    if (*oracle_cmd) {
      return run_oracle(oracle_instance, oracle_iters, oracle_alpha0,
                        oracle_seed, oracle_out);
    }
    if (*run_cmd) {
      ExperimentSpec spec;
      spec.instance = resolve_instance(run_instance);
      spec.algo = algo_from_name(run_algo);
      spec.delta = run_delta;
      spec.trials = run_trials;
      spec.seed = run_seed;
      spec.max_steps = run_max_steps;
      spec.trajectory_stride = run_stride;
      spec.use_stopping_rule = !run_no_stop;
      if (run_threshold == "theoretical") {
        spec.config.threshold_mode = ThresholdMode::theoretical;
        spec.config.c_tilde = run_c_tilde;
      } else if (run_threshold != "simplified") {
        std::cerr << "error: unknown threshold mode " << run_threshold << "\n";
        return 1;
      }
      if (spec.algo == AlgoKind::lucb_oracle) {
        if (lucb_fidelity == 0 || lucb_fidelity > spec.instance.fidelities) {
          std::cerr << "error: --target-fidelity out of range\n";
          return 1;
        }
        spec.lucb.target_fidelities.assign(spec.instance.arms,
                                           lucb_fidelity - 1);
        spec.lucb.bonus_scale = lucb_scale;
        spec.lucb.max_steps = run_max_steps;
      }
      auto batch = run_batch(spec, run_threads);
      write_run_outputs(spec, batch, fs::path(run_out));
      return 0;
    }
    if (*demo_cmd) {
      auto runs = make_demo(demo_name, demo_trials);
      for (const auto& demo : runs) {
        auto batch = run_batch(demo.spec, demo_threads);
        write_run_outputs(demo.spec, batch,
                          fs::path(demo_out) / demo_name / demo.label);
      }
      return 0;
    }
    if (*gen_cmd) {
      auto inst = random_instance_gen(gen_k, gen_m, gen_a, gen_b, gen_min_gap,
                                      gen_seed, gen_lambda, gen_sigma2);
      save_instance(inst, gen_out);
      std::cout << "wrote " << gen_out << "\n";
      return 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}

#include <filesystem>
#include <sstream>
#include <stdexcept>

#include "mfbai/model.hpp"

namespace mfbai {
namespace {

BanditInstance table_mu1() {
  return BanditInstance(
      4, 5,
      {0.9465, 0.7727, 0.8812, 0.8284, 0.8494,  //
       0.8526, 0.8708, 0.8515, 0.8374, 0.8401,  //
       0.8162, 0.9050, 0.8209, 0.8353, 0.8495,  //
       0.9099, 1.0594, 1.0083, 0.9745, 0.9856},
      RewardFamily::gaussian(0.1),
      {{0.1, 0.08, 0.05, 0.025, 0.0}, {0.05, 0.1, 0.2, 0.4, 5.0}});
}

BanditInstance table_mu2() {
  return BanditInstance(
      4, 5,
      {0.6944, 0.5634, 0.6178, 0.6323, 0.6171,  //
       0.5080, 0.3723, 0.4322, 0.4225, 0.4216,  //
       0.4153, 0.4132, 0.3817, 0.3838, 0.3831,  //
       0.3564, 0.4570, 0.4065, 0.3582, 0.3783},
      RewardFamily::gaussian(0.1),
      {{0.1, 0.08, 0.05, 0.025, 0.0}, {0.05, 0.1, 0.2, 0.4, 1.0}});
}

BanditInstance table_mu3() {
  return BanditInstance(
      4, 5,
      {0.41, 0.45, 0.47, 0.48, 0.50,  //
       0.35, 0.37, 0.38, 0.36, 0.35,  //
       0.51, 0.56, 0.64, 0.62, 0.61,  //
       0.41, 0.39, 0.40, 0.42, 0.42},
      RewardFamily::gaussian(0.1),
      {{0.1, 0.08, 0.04, 0.02, 0.0}, {0.1, 0.125, 0.25, 0.5, 1.0}});
}

BanditInstance five_by_two() {
  return BanditInstance(5, 2,
                        {0.4, 0.5,  //
                         0.4, 0.5,  //
                         0.4, 0.5,  //
                         0.4, 0.5,  //
                         0.5, 0.6},
                        RewardFamily::gaussian(0.1),
                        {{0.1, 0.0}, {0.5, 5.0}});
}

BanditInstance lucb_2x2() {
  return BanditInstance(2, 2,
                        {0.64, 0.60,  //
                         0.46, 0.50},
                        RewardFamily::gaussian(1.0),
                        {{0.1, 0.0}, {0.1, 5.0}});
}

// Two arms placed symmetrically around zero with opposite biases of xi/2 at
// the cheap fidelity. For cost ratios hi/lo >= 4 (at gap == xi) the optimal
// allocation sits entirely on the top fidelity.
BanditInstance compare_lb(double gap, double xi, double lambda_lo,
                          double lambda_hi) {
  double top1 = gap / 2.0;
  double top2 = -gap / 2.0;
  return BanditInstance(2, 2,
                        {top1 + xi / 2.0, top1,  //
                         top2 - xi / 2.0, top2},
                        RewardFamily::gaussian(0.5),
                        {{xi, 0.0}, {lambda_lo, lambda_hi}});
}

std::vector<double> parse_args(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) out.push_back(std::stod(item));
  return out;
}

}  // namespace

BanditInstance make_preset(const std::string& name) {
  if (name == "table-mu1") return table_mu1();
  if (name == "table-mu2") return table_mu2();
  if (name == "table-mu3") return table_mu3();
  if (name == "five-by-two") return five_by_two();
  if (name == "lucb-2x2") return lucb_2x2();
  if (name == "compare-lb") return compare_lb(0.2, 0.2, 1.0, 5.0);
  if (name.rfind("compare-lb(", 0) == 0 && name.back() == ')') {
    auto args = parse_args(name.substr(11, name.size() - 12));
    if (args.size() != 4) {
      throw std::invalid_argument(
          "compare-lb expects (gap, xi, lambda_lo, lambda_hi)");
    }
    return compare_lb(args[0], args[1], args[2], args[3]);
  }
  throw std::invalid_argument("unknown preset: " + name);
}

std::vector<std::string> preset_names() {
  return {"table-mu1",   "table-mu2", "table-mu3",
          "five-by-two", "lucb-2x2",  "compare-lb"};
}

BanditInstance resolve_instance(const std::string& name_or_path) {
  if (std::filesystem::exists(name_or_path)) return load_instance(name_or_path);
  return make_preset(name_or_path);
}

}  // namespace mfbai

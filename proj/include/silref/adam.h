#pragma once

#include <span>
#include <vector>

namespace silref {

// Adam with bias correction and a learning rate per parameter.
class Adam {
 public:
  Adam(std::vector<double> learning_rates, double beta1 = 0.9,
       double beta2 = 0.999, double eps = 1e-8);

  void Step(std::span<double> params, std::span<const double> grad);

  int iterations() const { return t_; }

 private:
  std::vector<double> lr_;
  double beta1_, beta2_, eps_;
  std::vector<double> m_, v_;
  int t_ = 0;
};

}  // namespace silref

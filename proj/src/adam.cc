#include "silref/adam.h"

#include <cmath>

#include "silref/errors.h"

namespace silref {

Adam::Adam(std::vector<double> learning_rates, double beta1, double beta2,
           double eps)
    : lr_(std::move(learning_rates)),
      beta1_(beta1),
      beta2_(beta2),
      eps_(eps),
      m_(lr_.size(), 0.0),
      v_(lr_.size(), 0.0) {}

void Adam::Step(std::span<double> params, std::span<const double> grad) {
  if (params.size() != lr_.size() || grad.size() != lr_.size()) {
    throw DimensionMismatch("Adam parameter count changed");
  }
  ++t_;
  const double c1 = 1.0 - std::pow(beta1_, t_);
  const double c2 = 1.0 - std::pow(beta2_, t_);
  for (std::size_t i = 0; i < params.size(); ++i) {
    m_[i] = beta1_ * m_[i] + (1.0 - beta1_) * grad[i];
    v_[i] = beta2_ * v_[i] + (1.0 - beta2_) * grad[i] * grad[i];
    const double m_hat = m_[i] / c1;
    const double v_hat = v_[i] / c2;
    params[i] -= lr_[i] * m_hat / (std::sqrt(v_hat) + eps_);
  }
}

}  // namespace silref

#pragma once

#include <cmath>

#include "sro/types.hpp"

namespace sro {

// Adaptive moment estimation with decoupled weight decay: the decay shrinks
// parameters by lr * wd before the bias-corrected adaptive update, so a zero
// gradient with wd > 0 is pure shrinkage by (1 - lr * wd).
class AdamW {
 public:
  AdamW(Index n, double lr, double weight_decay = 0.0, double beta1 = 0.9,
        double beta2 = 0.999, double eps = 1e-8)
      : lr_(lr),
        wd_(weight_decay),
        beta1_(beta1),
        beta2_(beta2),
        eps_(eps),
        m_(Vec::Zero(n)),
        v_(Vec::Zero(n)) {}

  void step(Vec& params, const Vec& grad) {
    if (grad.size() != params.size() || params.size() != m_.size()) {
      throw ArgumentError("AdamW::step: shape mismatch");
    }
    if (!grad.allFinite()) throw NumericError("AdamW::step: non-finite gradient");

    ++t_;
    params *= (1.0 - lr_ * wd_);
    m_ = beta1_ * m_ + (1.0 - beta1_) * grad;
    v_ = beta2_ * v_ + (1.0 - beta2_) * grad.cwiseProduct(grad);
    const double bc1 = 1.0 - std::pow(beta1_, t_);
    const double bc2 = 1.0 - std::pow(beta2_, t_);
    params.array() -=
        lr_ * (m_.array() / bc1) / ((v_.array() / bc2).sqrt() + eps_);
  }

  long steps_taken() const { return t_; }

 private:
  double lr_, wd_, beta1_, beta2_, eps_;
  long t_ = 0;
  Vec m_, v_;
};

}  // namespace sro

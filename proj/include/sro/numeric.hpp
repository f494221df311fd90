#pragma once

#include <cmath>

#include "sro/types.hpp"

namespace sro {

// Overflow-safe logistic function.
inline double sigmoid(double z) {
  if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
  const double t = std::exp(z);
  return t / (1.0 + t);
}

// ln(1 + e^t) without overflow for any finite t.
inline double softplus(double t) {
  if (t > 0.0) return t + std::log1p(std::exp(-t));
  return std::log1p(std::exp(t));
}

// -ln sigma(z) = ln(1 + e^{-z}); finite for |z| up to well past 700.
inline double neg_log_sigmoid(double z) { return softplus(-z); }

inline double logsumexp(const Vec& u) {
  const double m = u.maxCoeff();
  return m + std::log((u.array() - m).exp().sum());
}

// In-place stable softmax.
inline void softmax_inplace(Vec& u) {
  const double m = u.maxCoeff();
  u = (u.array() - m).exp();
  u /= u.sum();
}

}  // namespace sro

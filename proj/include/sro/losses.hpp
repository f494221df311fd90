#pragma once

#include <string>

#include "sro/policy.hpp"
#include "sro/types.hpp"

namespace sro {

enum class LossKind { sro, dpo, rs_sro, pa_sro };

LossKind parse_loss_kind(const std::string& s);
const char* loss_kind_name(LossKind k);

struct LossConfig {
  double beta = 0.01;
  LossKind kind = LossKind::sro;
};

// One leader-follower round: input x, paraphrase y, screener response a.
struct Interaction {
  TokenSeq x;
  TokenSeq y;
  int a = 0;  // 1 = passed screening, 0 = failed
};

enum class Branch { pass, fail, skipped };

struct LossValue {
  double value = 0.0;
  Vec grad;  // aligned with policy params
  Branch branch = Branch::skipped;
};

// beta-scaled log-ratio of policy to reference:
//   h = beta * (log f_theta(y|x) - log f_ref(y|x)).
// This is also the implicit reward r_hat(y, x); the two names are one
// quantity and no separate reward type exists.
double h_beta(const PolicyModel& policy, const ReferenceModel& ref,
              const TokenSeq& y, const TokenSeq& x, double beta);

// Pass branch: the standard preference loss -ln sigma(h(y|x) - h(x|x)) with
// the input x standing in for the dispreferred side. Gradient
//   -beta * sigma(r_hat(x,x) - r_hat(y,x)) * [grad log f(y|x) - grad log f(x|x)].
LossValue pass_loss(const PolicyModel& policy, const ReferenceModel& ref,
                    const TokenSeq& x, const TokenSeq& y, const LossConfig& cfg);

// Fail branch ("partial loss"): -ln sigma(-h(y|x)). Gradient
//   +beta * sigma(r_hat(y,x)) * grad log f(y|x),
// so a descent step decreases the likelihood of the failed paraphrase.
LossValue fail_loss(const PolicyModel& policy, const ReferenceModel& ref,
                    const TokenSeq& x, const TokenSeq& y, const LossConfig& cfg);

// Generic preference loss -ln sigma(h(y_w|x) - h(y_l|x)). Throws on a
// degenerate pair (y_w == y_l).
LossValue dpo_loss(const PolicyModel& policy, const ReferenceModel& ref,
                   const TokenSeq& x, const TokenSeq& y_w, const TokenSeq& y_l,
                   double beta);

// Hybrid loss: pass branch when a = 1, fail branch when a = 0.
LossValue sro_loss(const PolicyModel& policy, const ReferenceModel& ref,
                   const Interaction& it, const LossConfig& cfg);

// Response-selective ablation: fail interactions are skipped entirely
// (zero value, zero gradient).
LossValue rs_sro_loss(const PolicyModel& policy, const ReferenceModel& ref,
                      const Interaction& it, const LossConfig& cfg);

// Preference-agnostic ablation: the pass branch drops the h(x|x) comparison
// term; the fail branch is identical to fail_loss.
LossValue pa_sro_loss(const PolicyModel& policy, const ReferenceModel& ref,
                      const Interaction& it, const LossConfig& cfg);

// Dispatch by cfg.kind; used by the trainer.
LossValue compute_loss(const PolicyModel& policy, const ReferenceModel& ref,
                       const Interaction& it, const LossConfig& cfg);

}  // namespace sro

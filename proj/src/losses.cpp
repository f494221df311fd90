#include "sro/losses.hpp"

#include <cmath>

#include "sro/numeric.hpp"

namespace sro {

LossKind parse_loss_kind(const std::string& s) {
  if (s == "sro") return LossKind::sro;
  if (s == "dpo" || s == "dpo-pass-only") return LossKind::dpo;
  if (s == "rs-sro") return LossKind::rs_sro;
  if (s == "pa-sro") return LossKind::pa_sro;
  throw ArgumentError("unknown loss kind: " + s);
}

const char* loss_kind_name(LossKind k) {
  switch (k) {
    case LossKind::sro: return "sro";
    case LossKind::dpo: return "dpo-pass-only";
    case LossKind::rs_sro: return "rs-sro";
    case LossKind::pa_sro: return "pa-sro";
  }
  return "sro";
}

namespace {

void require_beta(double beta) {
  if (!(beta > 0.0) || !std::isfinite(beta)) {
    throw ArgumentError("loss: beta must be positive and finite");
  }
}

void check_finite(const LossValue& lv, const char* where) {
  if (!std::isfinite(lv.value) || !lv.grad.allFinite()) {
    throw NumericError(std::string(where) + ": non-finite loss or gradient");
  }
}

}  // namespace

double h_beta(const PolicyModel& policy, const ReferenceModel& ref,
              const TokenSeq& y, const TokenSeq& x, double beta) {
  require_beta(beta);
  return beta * (log_prob(policy, y, x) - log_prob(ref, y, x));
}

LossValue pass_loss(const PolicyModel& policy, const ReferenceModel& ref,
                    const TokenSeq& x, const TokenSeq& y, const LossConfig& cfg) {
  require_beta(cfg.beta);
  const Scored sy = score_with_grad(policy, y, x);
  const Scored sx = score_with_grad(policy, x, x);
  const double hy = cfg.beta * (sy.logp - log_prob(ref, y, x));
  const double hx = cfg.beta * (sx.logp - log_prob(ref, x, x));
  const double margin = hy - hx;

  LossValue lv;
  lv.branch = Branch::pass;
  lv.value = neg_log_sigmoid(margin);
  const double coeff = cfg.beta * sigmoid(hx - hy);
  lv.grad = -coeff * (sy.grad - sx.grad);
  check_finite(lv, "pass_loss");
  return lv;
}

LossValue fail_loss(const PolicyModel& policy, const ReferenceModel& ref,
                    const TokenSeq& x, const TokenSeq& y, const LossConfig& cfg) {
  require_beta(cfg.beta);
  const Scored sy = score_with_grad(policy, y, x);
  const double hy = cfg.beta * (sy.logp - log_prob(ref, y, x));

  LossValue lv;
  lv.branch = Branch::fail;
  lv.value = neg_log_sigmoid(-hy);
  lv.grad = (cfg.beta * sigmoid(hy)) * sy.grad;
  check_finite(lv, "fail_loss");
  return lv;
}

LossValue dpo_loss(const PolicyModel& policy, const ReferenceModel& ref,
                   const TokenSeq& x, const TokenSeq& y_w, const TokenSeq& y_l,
                   double beta) {
  require_beta(beta);
  if (y_w.ids == y_l.ids) {
    throw ArgumentError("dpo_loss: degenerate pair (y_w == y_l)");
  }
  const Scored sw = score_with_grad(policy, y_w, x);
  const Scored sl = score_with_grad(policy, y_l, x);
  const double hw = beta * (sw.logp - log_prob(ref, y_w, x));
  const double hl = beta * (sl.logp - log_prob(ref, y_l, x));
  const double margin = hw - hl;

  LossValue lv;
  lv.branch = Branch::pass;
  lv.value = neg_log_sigmoid(margin);
  const double coeff = beta * sigmoid(hl - hw);
  lv.grad = -coeff * (sw.grad - sl.grad);
  check_finite(lv, "dpo_loss");
  return lv;
}

LossValue sro_loss(const PolicyModel& policy, const ReferenceModel& ref,
                   const Interaction& it, const LossConfig& cfg) {
  if (it.a != 0 && it.a != 1) throw ArgumentError("sro_loss: response must be 0 or 1");
  return it.a == 1 ? pass_loss(policy, ref, it.x, it.y, cfg)
                   : fail_loss(policy, ref, it.x, it.y, cfg);
}

LossValue rs_sro_loss(const PolicyModel& policy, const ReferenceModel& ref,
                      const Interaction& it, const LossConfig& cfg) {
  if (it.a != 0 && it.a != 1) throw ArgumentError("rs_sro_loss: response must be 0 or 1");
  if (it.a == 0) {
    LossValue lv;
    lv.value = 0.0;
    lv.grad = Vec::Zero(policy.n_params());
    lv.branch = Branch::skipped;
    return lv;
  }
  return pass_loss(policy, ref, it.x, it.y, cfg);
}

LossValue pa_sro_loss(const PolicyModel& policy, const ReferenceModel& ref,
                      const Interaction& it, const LossConfig& cfg) {
  if (it.a != 0 && it.a != 1) throw ArgumentError("pa_sro_loss: response must be 0 or 1");
  if (it.a == 0) return fail_loss(policy, ref, it.x, it.y, cfg);

  require_beta(cfg.beta);
  const Scored sy = score_with_grad(policy, it.y, it.x);
  const double hy = cfg.beta * (sy.logp - log_prob(ref, it.y, it.x));

  LossValue lv;
  lv.branch = Branch::pass;
  lv.value = neg_log_sigmoid(hy);
  lv.grad = (-cfg.beta * sigmoid(-hy)) * sy.grad;
  check_finite(lv, "pa_sro_loss");
  return lv;
}

LossValue compute_loss(const PolicyModel& policy, const ReferenceModel& ref,
                       const Interaction& it, const LossConfig& cfg) {
  switch (cfg.kind) {
    case LossKind::sro:
      return sro_loss(policy, ref, it, cfg);
    case LossKind::dpo: {
      // Unconditional preference on (y, x); tolerates y == x, where the
      // margin and its gradient vanish identically.
      LossValue lv = pass_loss(policy, ref, it.x, it.y, cfg);
      return lv;
    }
    case LossKind::rs_sro:
      return rs_sro_loss(policy, ref, it, cfg);
    case LossKind::pa_sro:
      return pa_sro_loss(policy, ref, it, cfg);
  }
  throw ArgumentError("compute_loss: unknown loss kind");
}

}  // namespace sro

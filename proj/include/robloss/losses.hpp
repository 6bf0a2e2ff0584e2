#pragma once

#include <cstddef>
#include <vector>

#include "robloss/matrix.hpp"

namespace robloss {

/// Loss family for training with missing or noisy ground truth, with
/// analytic gradients with respect to the logits. Targets derived from the
/// model's own output (pseudo-labels, smoothed self-targets, smoothed
/// labels) are treated as constants during differentiation.

/// Samples with one-hot targets. targets has one row per logit row; each
/// row is one-hot (entries in {0,1}, summing to 1).
struct LabeledBatch {
  Matrix logits;   // N_l x C
  Matrix targets;  // N_l x C, one-hot rows

  static LabeledBatch from_labels(Matrix logits, const std::vector<int>& labels);
  std::size_t size() const { return logits.rows(); }
  std::size_t classes() const { return logits.cols(); }
  void validate() const;
};

/// Samples carrying only model predictions; their targets are fabricated
/// from the predictions themselves.
struct UnlabeledBatch {
  Matrix logits;  // N_u x C

  std::size_t size() const { return logits.rows(); }
  std::size_t classes() const { return logits.cols(); }
};

/// Hyperparameters of the missing-ground-truth losses.
struct MissingLossConfig {
  double gamma = 0.95;    // confidence threshold for the mu gate
  double xi = 0.9;        // smoothing coefficient of the self-target
  double lambda1 = 1.0;   // weight of the supervised term
  double lambda2 = 1.0;   // weight of the unlabeled term
  // Divide the unlabeled sum by the number of gate-passing samples instead
  // of the full batch size. Off by default: the formula divides by N_u.
  bool normalize_by_gated_count = false;

  void validate() const;
};

/// Hyperparameters of the noisy-ground-truth losses.
struct NoisyLossConfig {
  double delta = 0.8;       // label smoothing coefficient
  double alpha1 = 1.0;      // forward term weight
  double alpha2 = 1.0;      // reverse term weight
  double log_floor = -4.0;  // stands in for log(0); only reachable entries
                            // of the smoothed target use it (delta = 1, or
                            // delta = 0 on the label entry)
  // Smooth the prediction p instead of the observed label q, as the text
  // defining s(c|d) literally reads. The default smooths q.
  bool literal_paper_smoothing = false;

  void validate() const;
};

/// Universal return of every loss operation: scalar value (nats) plus the
/// gradient with respect to each logit. Rows of gated-out samples are zero.
struct LossReport {
  double value = 0.0;
  Matrix grad_logits;  // N x C
};

/// L_w: mean cross entropy over labeled samples,
/// -(1/N_l) sum_n sum_m a log p. Gradient per sample: (p - a) / N_l.
LossReport ce_supervised(const LabeledBatch& batch);

/// L_p: confidence-gated pseudo-label loss. Each sample's target is the
/// one-hot argmax of its own prediction; the term is kept only when
/// max(p) > gamma. The sum divides by N_u regardless of how many samples
/// pass the gate.
LossReport pseudo_label_loss(const UnlabeledBatch& batch, double gamma);
LossReport pseudo_label_loss(const UnlabeledBatch& batch,
                             const MissingLossConfig& config);

/// L_u: like L_p but with the smoothed self-target s = xi*p + (1-xi)(1-p)/(C-1)
/// in place of the one-hot pseudo-label. s is frozen during differentiation,
/// so the gradient of a gated-in sample is (p - s) / N_u.
LossReport smoothed_unlabeled_loss(const UnlabeledBatch& batch,
                                   const MissingLossConfig& config);

/// L_m = lambda1 * L_w + lambda2 * L_u. Either batch may be empty (its term
/// is zero); both empty is an error. Gradient rows are the labeled rows
/// followed by the unlabeled rows.
LossReport combined_missing_loss(const LabeledBatch& labeled,
                                 const UnlabeledBatch& unlabeled,
                                 const MissingLossConfig& config);

/// L_t: symmetric cross entropy with one-hot labels. The reverse term's
/// log q uses config.log_floor in place of log 0.
LossReport sce_baseline(const LabeledBatch& batch, const NoisyLossConfig& config);

/// L_ce: forward cross entropy against the delta-smoothed target.
LossReport smoothed_ce(const LabeledBatch& batch, const NoisyLossConfig& config);

/// L_rce: reverse cross entropy, -(1/N) sum p log s. The smoothed target is
/// strictly positive for delta in (0,1), so no floor is involved there.
LossReport smoothed_rce(const LabeledBatch& batch, const NoisyLossConfig& config);

/// L_n = alpha1 * L_ce + alpha2 * L_rce.
LossReport symmetric_noisy_loss(const LabeledBatch& batch,
                                const NoisyLossConfig& config);

namespace detail {

/// One gated smoothed self-target term: value = mu(max p > gamma) *
/// (-sum_m s_m log p_m) with s = smooth(p, xi) frozen; grad = gated ?
/// (p - s) : 0. Shared by L_u and the composite grasp losses.
struct TermGrad {
  double value = 0.0;
  bool gated_in = false;
  std::vector<double> grad;  // d value / d logits
};
TermGrad smoothed_self_target_term(std::span<const double> logits, double gamma,
                                   double xi);

/// The smoothed target used by the noisy losses: smooth(q, delta) by
/// default, smooth(p, delta) in literal mode (then frozen).
std::vector<double> noisy_target(std::span<const double> probs,
                                 std::span<const double> target_row,
                                 const NoisyLossConfig& config);

}  // namespace detail

}  // namespace robloss

#include "robloss/losses.hpp"

#include <cmath>

#include "robloss/prob.hpp"

namespace robloss {

LabeledBatch LabeledBatch::from_labels(Matrix logits,
                                       const std::vector<int>& labels) {
  if (labels.size() != logits.rows())
    throw SizeMismatchError("LabeledBatch::from_labels: label count != rows");
  Matrix targets(logits.rows(), logits.cols(), 0.0);
  for (std::size_t n = 0; n < labels.size(); ++n) {
    const int y = labels[n];
    if (y < 0 || static_cast<std::size_t>(y) >= logits.cols())
      throw InvalidInputError("LabeledBatch::from_labels: label out of range");
    targets.at(n, static_cast<std::size_t>(y)) = 1.0;
  }
  return LabeledBatch{std::move(logits), std::move(targets)};
}

void LabeledBatch::validate() const {
  if (targets.rows() != logits.rows() || targets.cols() != logits.cols())
    throw SizeMismatchError("LabeledBatch: target shape != logit shape");
  for (std::size_t n = 0; n < logits.rows(); ++n) {
    detail::require_finite(logits.row(n), "LabeledBatch logits");
    double sum = 0.0;
    for (double t : targets.row(n)) {
      if (t != 0.0 && t != 1.0)
        throw InvalidInputError("LabeledBatch: target entries must be 0 or 1");
      sum += t;
    }
    if (sum != 1.0)
      throw InvalidInputError("LabeledBatch: each target row must sum to 1");
  }
}

void MissingLossConfig::validate() const {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw InvalidInputError("MissingLossConfig: gamma outside [0, 1]");
  if (!(xi >= 0.0 && xi <= 1.0))
    throw InvalidInputError("MissingLossConfig: xi outside [0, 1]");
  if (lambda1 < 0.0 || lambda2 < 0.0)
    throw InvalidInputError("MissingLossConfig: negative weight");
}

void NoisyLossConfig::validate() const {
  if (!(delta >= 0.0 && delta <= 1.0))
    throw InvalidInputError("NoisyLossConfig: delta outside [0, 1]");
  if (alpha1 < 0.0 || alpha2 < 0.0)
    throw InvalidInputError("NoisyLossConfig: negative weight");
  if (!(log_floor < 0.0))
    throw InvalidInputError("NoisyLossConfig: log_floor must be negative");
}

namespace {

// log of a smoothed-target entry; exact zeros (delta = 1 off-label,
// delta = 0 on-label) fall back to the floor.
double floored_log(double s, double log_floor) {
  return s > 0.0 ? std::log(s) : log_floor;
}

}  // namespace

namespace detail {

TermGrad smoothed_self_target_term(std::span<const double> logits, double gamma,
                                   double xi) {
  TermGrad out;
  out.grad.assign(logits.size(), 0.0);
  const std::vector<double> p = softmax(logits);
  if (!confidence_gate(p, gamma)) return out;
  out.gated_in = true;
  const std::vector<double> s = smooth_distribution(p, xi);
  const std::vector<double> lsm = log_softmax(logits);
  for (std::size_t m = 0; m < p.size(); ++m) {
    out.value -= s[m] * lsm[m];
    out.grad[m] = p[m] - s[m];
  }
  return out;
}

std::vector<double> noisy_target(std::span<const double> probs,
                                 std::span<const double> target_row,
                                 const NoisyLossConfig& config) {
  if (config.literal_paper_smoothing)
    return smooth_distribution(probs, config.delta);
  return smooth_distribution(target_row, config.delta);
}

}  // namespace detail

LossReport ce_supervised(const LabeledBatch& batch) {
  if (batch.size() == 0) throw EmptyBatchError("ce_supervised: empty batch");
  batch.validate();
  const std::size_t n_l = batch.size();
  LossReport report;
  report.grad_logits = Matrix(n_l, batch.classes());
  for (std::size_t n = 0; n < n_l; ++n) {
    const auto lsm = log_softmax(batch.logits.row(n));
    const auto p = softmax(batch.logits.row(n));
    for (std::size_t m = 0; m < batch.classes(); ++m) {
      report.value -= batch.targets.at(n, m) * lsm[m];
      report.grad_logits.at(n, m) =
          (p[m] - batch.targets.at(n, m)) / static_cast<double>(n_l);
    }
  }
  report.value /= static_cast<double>(n_l);
  return report;
}

LossReport pseudo_label_loss(const UnlabeledBatch& batch, double gamma) {
  MissingLossConfig config;
  config.gamma = gamma;
  return pseudo_label_loss(batch, config);
}

LossReport pseudo_label_loss(const UnlabeledBatch& batch,
                             const MissingLossConfig& config) {
  if (batch.size() == 0) throw EmptyBatchError("pseudo_label_loss: empty batch");
  config.validate();
  const std::size_t n_u = batch.size();
  LossReport report;
  report.grad_logits = Matrix(n_u, batch.classes());
  std::size_t gated = 0;
  for (std::size_t n = 0; n < n_u; ++n) {
    const auto p = softmax(batch.logits.row(n));
    if (!confidence_gate(p, config.gamma)) continue;
    ++gated;
    const std::size_t label = argmax_label(p);
    const auto lsm = log_softmax(batch.logits.row(n));
    report.value -= lsm[label];
    // one-hot pseudo-label held constant: grad = p - onehot(label)
    for (std::size_t m = 0; m < batch.classes(); ++m)
      report.grad_logits.at(n, m) = p[m] - (m == label ? 1.0 : 0.0);
  }
  const double denom = config.normalize_by_gated_count
                           ? static_cast<double>(gated == 0 ? 1 : gated)
                           : static_cast<double>(n_u);
  report.value /= denom;
  for (double& g : report.grad_logits.flat()) g /= denom;
  return report;
}

LossReport smoothed_unlabeled_loss(const UnlabeledBatch& batch,
                                   const MissingLossConfig& config) {
  if (batch.size() == 0)
    throw EmptyBatchError("smoothed_unlabeled_loss: empty batch");
  if (batch.classes() < 2)
    throw DegenerateDimensionError("smoothed_unlabeled_loss: C = 1");
  config.validate();
  const std::size_t n_u = batch.size();
  LossReport report;
  report.grad_logits = Matrix(n_u, batch.classes());
  std::size_t gated = 0;
  for (std::size_t n = 0; n < n_u; ++n) {
    const auto term = detail::smoothed_self_target_term(batch.logits.row(n),
                                                        config.gamma, config.xi);
    if (!term.gated_in) continue;
    ++gated;
    report.value += term.value;
    for (std::size_t m = 0; m < batch.classes(); ++m)
      report.grad_logits.at(n, m) = term.grad[m];
  }
  const double denom = config.normalize_by_gated_count
                           ? static_cast<double>(gated == 0 ? 1 : gated)
                           : static_cast<double>(n_u);
  report.value /= denom;
  for (double& g : report.grad_logits.flat()) g /= denom;
  return report;
}

LossReport combined_missing_loss(const LabeledBatch& labeled,
                                 const UnlabeledBatch& unlabeled,
                                 const MissingLossConfig& config) {
  if (labeled.size() == 0 && unlabeled.size() == 0)
    throw EmptyBatchError("combined_missing_loss: both batches empty");
  config.validate();
  const std::size_t cols =
      labeled.size() > 0 ? labeled.classes() : unlabeled.classes();
  if (labeled.size() > 0 && unlabeled.size() > 0 &&
      labeled.classes() != unlabeled.classes())
    throw SizeMismatchError("combined_missing_loss: class count mismatch");

  LossReport report;
  report.grad_logits = Matrix(labeled.size() + unlabeled.size(), cols);
  if (labeled.size() > 0) {
    const LossReport lw = ce_supervised(labeled);
    report.value += config.lambda1 * lw.value;
    for (std::size_t n = 0; n < labeled.size(); ++n)
      for (std::size_t m = 0; m < cols; ++m)
        report.grad_logits.at(n, m) = config.lambda1 * lw.grad_logits.at(n, m);
  }
  if (unlabeled.size() > 0) {
    const LossReport lu = smoothed_unlabeled_loss(unlabeled, config);
    report.value += config.lambda2 * lu.value;
    for (std::size_t n = 0; n < unlabeled.size(); ++n)
      for (std::size_t m = 0; m < cols; ++m)
        report.grad_logits.at(labeled.size() + n, m) =
            config.lambda2 * lu.grad_logits.at(n, m);
  }
  return report;
}

LossReport sce_baseline(const LabeledBatch& batch, const NoisyLossConfig& config) {
  if (batch.size() == 0) throw EmptyBatchError("sce_baseline: empty batch");
  batch.validate();
  config.validate();
  const std::size_t n_samples = batch.size();
  const std::size_t classes = batch.classes();
  LossReport report;
  report.grad_logits = Matrix(n_samples, classes);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const auto p = softmax(batch.logits.row(n));
    const auto lsm = log_softmax(batch.logits.row(n));
    // forward: -sum q log p
    double dot = 0.0;  // sum_c p_c log q_c, with the floor at q = 0
    for (std::size_t m = 0; m < classes; ++m) {
      const double q = batch.targets.at(n, m);
      report.value -= q * lsm[m];
      dot += p[m] * floored_log(q, config.log_floor);
    }
    report.value -= dot;
    for (std::size_t m = 0; m < classes; ++m) {
      const double q = batch.targets.at(n, m);
      const double log_q = floored_log(q, config.log_floor);
      report.grad_logits.at(n, m) =
          ((p[m] - q) + p[m] * (dot - log_q)) / static_cast<double>(n_samples);
    }
  }
  report.value /= static_cast<double>(n_samples);
  return report;
}

LossReport smoothed_ce(const LabeledBatch& batch, const NoisyLossConfig& config) {
  if (batch.size() == 0) throw EmptyBatchError("smoothed_ce: empty batch");
  if (batch.classes() < 2) throw DegenerateDimensionError("smoothed_ce: C = 1");
  batch.validate();
  config.validate();
  const std::size_t n_samples = batch.size();
  LossReport report;
  report.grad_logits = Matrix(n_samples, batch.classes());
  for (std::size_t n = 0; n < n_samples; ++n) {
    const auto p = softmax(batch.logits.row(n));
    const auto lsm = log_softmax(batch.logits.row(n));
    const auto s = detail::noisy_target(p, batch.targets.row(n), config);
    for (std::size_t m = 0; m < batch.classes(); ++m) {
      report.value -= s[m] * lsm[m];
      report.grad_logits.at(n, m) = (p[m] - s[m]) / static_cast<double>(n_samples);
    }
  }
  report.value /= static_cast<double>(n_samples);
  return report;
}

LossReport smoothed_rce(const LabeledBatch& batch, const NoisyLossConfig& config) {
  if (batch.size() == 0) throw EmptyBatchError("smoothed_rce: empty batch");
  if (batch.classes() < 2) throw DegenerateDimensionError("smoothed_rce: C = 1");
  batch.validate();
  config.validate();
  const std::size_t n_samples = batch.size();
  const std::size_t classes = batch.classes();
  LossReport report;
  report.grad_logits = Matrix(n_samples, classes);
  for (std::size_t n = 0; n < n_samples; ++n) {
    const auto p = softmax(batch.logits.row(n));
    const auto s = detail::noisy_target(p, batch.targets.row(n), config);
    double dot = 0.0;  // sum_c p_c log s_c
    std::vector<double> log_s(classes);
    for (std::size_t m = 0; m < classes; ++m) {
      log_s[m] = floored_log(s[m], config.log_floor);
      dot += p[m] * log_s[m];
    }
    report.value -= dot;
    for (std::size_t m = 0; m < classes; ++m)
      report.grad_logits.at(n, m) =
          p[m] * (dot - log_s[m]) / static_cast<double>(n_samples);
  }
  report.value /= static_cast<double>(n_samples);
  return report;
}

LossReport symmetric_noisy_loss(const LabeledBatch& batch,
                                const NoisyLossConfig& config) {
  const LossReport ce = smoothed_ce(batch, config);
  const LossReport rce = smoothed_rce(batch, config);
  LossReport report;
  report.value = config.alpha1 * ce.value + config.alpha2 * rce.value;
  report.grad_logits = Matrix(batch.size(), batch.classes());
  for (std::size_t i = 0; i < report.grad_logits.size(); ++i)
    report.grad_logits.flat()[i] = config.alpha1 * ce.grad_logits.flat()[i] +
                                   config.alpha2 * rce.grad_logits.flat()[i];
  return report;
}

}  // namespace robloss

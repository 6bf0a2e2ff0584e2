#include "robloss/composite.hpp"

#include <algorithm>
#include <cmath>

#include "robloss/prob.hpp"

namespace robloss {

ValueBinning ValueBinning::uniform(double lo, double hi, std::size_t bins) {
  if (bins < 2) throw InvalidInputError("ValueBinning: need at least 2 bins");
  if (!(hi > lo)) throw InvalidInputError("ValueBinning: hi must exceed lo");
  ValueBinning b;
  const double width = (hi - lo) / static_cast<double>(bins);
  b.edges.resize(bins + 1);
  for (std::size_t i = 0; i <= bins; ++i)
    b.edges[i] = lo + width * static_cast<double>(i);
  b.tau = width;
  return b;
}

void ValueBinning::validate() const {
  if (bins() < 2) throw InvalidInputError("ValueBinning: need at least 2 bins");
  if (!(tau > 0.0)) throw InvalidInputError("ValueBinning: tau must be positive");
  if (!std::is_sorted(edges.begin(), edges.end()))
    throw InvalidInputError("ValueBinning: edges must ascend");
}

std::vector<double> ValueBinning::soft_logits(double x) const {
  std::vector<double> out(bins());
  for (std::size_t c = 0; c < out.size(); ++c) {
    const double z = (x - center(c)) / tau;
    out[c] = -0.5 * z * z;
  }
  return out;
}

std::vector<double> ValueBinning::soft_logit_grads(double x) const {
  std::vector<double> out(bins());
  for (std::size_t c = 0; c < out.size(); ++c)
    out[c] = -(x - center(c)) / (tau * tau);
  return out;
}

std::size_t ValueBinning::hard_bin(double x) const {
  const auto it = std::upper_bound(edges.begin(), edges.end(), x);
  if (it == edges.begin()) return 0;
  const std::size_t idx = static_cast<std::size_t>(it - edges.begin()) - 1;
  return std::min(idx, bins() - 1);
}

void GraspCandidateBatch::validate() const {
  if (graspable_logits.rows() != n || graspable_logits.cols() != 2)
    throw SizeMismatchError("GraspCandidateBatch: graspable_logits shape");
  if (graspable_truth.size() != n || has_score_truth.size() != n)
    throw SizeMismatchError("GraspCandidateBatch: per-sample arrays");
  if (view_scores.rows() != n || view_scores.cols() != views)
    throw SizeMismatchError("GraspCandidateBatch: view_scores shape");
  if (view_score_truth.rows() != n || view_score_truth.cols() != views)
    throw SizeMismatchError("GraspCandidateBatch: view_score_truth shape");
  if (pred_approach.size() != n * views || true_approach.size() != n * views)
    throw SizeMismatchError("GraspCandidateBatch: approach arrays");
  for (int c : graspable_truth)
    if (c != 0 && c != 1)
      throw InvalidInputError("GraspCandidateBatch: graspable_truth not binary");
  score_bins.validate();
}

void OperationBatch::validate() const {
  if (rotation_logits.rows() != n * dist_bins ||
      rotation_logits.cols() != rot_classes)
    throw SizeMismatchError("OperationBatch: rotation_logits shape");
  if (score_pred.rows() != n || score_pred.cols() != dist_bins ||
      width_pred.rows() != n || width_pred.cols() != dist_bins)
    throw SizeMismatchError("OperationBatch: prediction shapes");
  if (rotation_truth.size() != n * dist_bins)
    throw SizeMismatchError("OperationBatch: rotation_truth size");
  if (score_truth.rows() != n || score_truth.cols() != dist_bins ||
      width_truth.rows() != n || width_truth.cols() != dist_bins)
    throw SizeMismatchError("OperationBatch: truth shapes");
  if (has_truth.size() != n)
    throw SizeMismatchError("OperationBatch: has_truth size");
  if (rot_classes < 2)
    throw DegenerateDimensionError("OperationBatch: rot_classes < 2");
  score_bins.validate();
  width_bins.validate();
}

SmoothL1Result smooth_l1(double pred, double truth) {
  if (!std::isfinite(pred) || !std::isfinite(truth))
    throw InvalidInputError("smooth_l1: non-finite input");
  const double diff = pred - truth;
  if (std::abs(diff) < 1.0) return {0.5 * diff * diff, diff};
  return {std::abs(diff) - 0.5, diff > 0.0 ? 1.0 : -1.0};
}

TwoClassResult two_class_softmax_loss(const std::array<double, 2>& logits,
                                      int truth) {
  if (truth != 0 && truth != 1)
    throw InvalidInputError("two_class_softmax_loss: truth must be 0 or 1");
  const auto lsm = log_softmax(std::span<const double>(logits));
  const auto p = softmax(std::span<const double>(logits));
  TwoClassResult out;
  out.value = -lsm[static_cast<std::size_t>(truth)];
  out.grad[0] = p[0] - (truth == 0 ? 1.0 : 0.0);
  out.grad[1] = p[1] - (truth == 1 ? 1.0 : 0.0);
  return out;
}

SigmoidCeResult sigmoid_ce(std::span<const double> logits, std::size_t truth) {
  if (truth >= logits.size())
    throw InvalidInputError("sigmoid_ce: truth index out of range");
  detail::require_finite(logits, "sigmoid_ce");
  SigmoidCeResult out;
  out.grad.resize(logits.size());
  for (std::size_t k = 0; k < logits.size(); ++k) {
    const double z = logits[k];
    const double y = k == truth ? 1.0 : 0.0;
    // max(z,0) - z*y + log(1 + exp(-|z|))
    out.value += std::max(z, 0.0) - z * y + std::log1p(std::exp(-std::abs(z)));
    const double sig = 1.0 / (1.0 + std::exp(-z));
    out.grad[k] = sig - y;
  }
  return out;
}

namespace {

// gated smoothed self-target term on the binned distribution of a scalar
// prediction, with the chain rule back to the scalar
struct ScalarTerm {
  double value = 0.0;
  double grad = 0.0;
};

ScalarTerm binned_self_target_term(double pred, const ValueBinning& bins,
                                   double gamma, double xi) {
  const auto logits = bins.soft_logits(pred);
  const auto term = detail::smoothed_self_target_term(logits, gamma, xi);
  ScalarTerm out;
  out.value = term.value;
  if (term.gated_in) {
    const auto dlogit = bins.soft_logit_grads(pred);
    for (std::size_t c = 0; c < dlogit.size(); ++c)
      out.grad += term.grad[c] * dlogit[c];
  }
  return out;
}

// alpha1 * L_ce + alpha2 * L_rce of one sample over explicit logits, with
// the target one-hot at `truth`; returns the gradient over the logits
struct SymmetricTerm {
  double value = 0.0;
  std::vector<double> grad;
};

SymmetricTerm symmetric_term(std::span<const double> logits, std::size_t truth,
                             const NoisyLossConfig& config) {
  const auto p = softmax(logits);
  const auto lsm = log_softmax(logits);
  std::vector<double> one_hot(logits.size(), 0.0);
  one_hot[truth] = 1.0;
  const auto s = detail::noisy_target(p, one_hot, config);

  SymmetricTerm out;
  out.grad.assign(logits.size(), 0.0);
  double dot = 0.0;  // sum_c p_c log s_c, floored at s = 0
  std::vector<double> log_s(logits.size());
  for (std::size_t c = 0; c < logits.size(); ++c) {
    log_s[c] = s[c] > 0.0 ? std::log(s[c]) : config.log_floor;
    dot += p[c] * log_s[c];
    out.value -= config.alpha1 * s[c] * lsm[c];
  }
  out.value -= config.alpha2 * dot;
  for (std::size_t c = 0; c < logits.size(); ++c)
    out.grad[c] = config.alpha1 * (p[c] - s[c]) +
                  config.alpha2 * p[c] * (dot - log_s[c]);
  return out;
}

// symmetric term of a binned scalar, chained back to the scalar
ScalarTerm binned_symmetric_term(double pred, double truth,
                                 const ValueBinning& bins,
                                 const NoisyLossConfig& config) {
  const auto logits = bins.soft_logits(pred);
  const auto term = symmetric_term(logits, bins.hard_bin(truth), config);
  const auto dlogit = bins.soft_logit_grads(pred);
  ScalarTerm out;
  out.value = term.value;
  for (std::size_t c = 0; c < dlogit.size(); ++c)
    out.grad += term.grad[c] * dlogit[c];
  return out;
}

double resolve_normalizer(std::size_t override_value, std::size_t derived,
                          const char* what) {
  const std::size_t n = override_value > 0 ? override_value : derived;
  if (n == 0) throw DegenerateNormalizerError(what);
  return static_cast<double>(n);
}

}  // namespace

ApproachLossReport approach_loss(const GraspCandidateBatch& batch,
                                 const MissingLossConfig& config,
                                 const CompositeWeights& weights) {
  batch.validate();
  config.validate();
  if (batch.n == 0)
    throw DegenerateNormalizerError("approach_loss: empty batch (N_cls = 0)");

  ApproachLossReport report;
  report.grad_graspable = Matrix(batch.n, 2);
  report.grad_view_scores = Matrix(batch.n, batch.views);

  const double n_cls = resolve_normalizer(weights.n_cls, batch.n,
                                          "approach_loss: N_cls is zero");

  double cls_sum = 0.0;
  for (std::size_t i = 0; i < batch.n; ++i) {
    const auto row = batch.graspable_logits.row(i);
    const auto cls =
        two_class_softmax_loss({row[0], row[1]}, batch.graspable_truth[i]);
    cls_sum += cls.value;
    report.grad_graspable.at(i, 0) = cls.grad[0] / n_cls;
    report.grad_graspable.at(i, 1) = cls.grad[1] / n_cls;
  }

  // the gate needs the truths that are always present: c_i* and v*_ij
  std::size_t gate_count = 0;
  std::vector<bool> gate(batch.n * batch.views, false);
  for (std::size_t i = 0; i < batch.n; ++i) {
    if (batch.graspable_truth[i] != 1) continue;
    for (std::size_t j = 0; j < batch.views; ++j) {
      const std::size_t ij = i * batch.views + j;
      if (approach_angle_deg(batch.pred_approach[ij], batch.true_approach[ij]) <
          kApproachAngleGateDeg) {
        gate[ij] = true;
        ++gate_count;
      }
    }
  }

  double reg_sum = 0.0;
  if (gate_count > 0) {
    const double n_reg = resolve_normalizer(weights.n_reg, gate_count,
                                            "approach_loss: N_reg is zero");
    for (std::size_t i = 0; i < batch.n; ++i) {
      for (std::size_t j = 0; j < batch.views; ++j) {
        if (!gate[i * batch.views + j]) continue;
        if (batch.has_score_truth[i]) {
          const auto reg = smooth_l1(batch.view_scores.at(i, j),
                                     batch.view_score_truth.at(i, j));
          reg_sum += reg.value;
          report.grad_view_scores.at(i, j) =
              weights.beta1 * reg.grad / n_reg;
        } else {
          const auto term =
              binned_self_target_term(batch.view_scores.at(i, j),
                                      batch.score_bins, config.gamma, config.xi);
          reg_sum += term.value;
          report.grad_view_scores.at(i, j) =
              weights.beta1 * term.grad / n_reg;
        }
      }
    }
    reg_sum /= n_reg;
  }

  report.value = cls_sum / n_cls + weights.beta1 * reg_sum;
  return report;
}

OperationLossReport operation_loss_missing(const OperationBatch& batch,
                                           const MissingLossConfig& config,
                                           const CompositeWeights& weights) {
  batch.validate();
  config.validate();
  if (batch.n == 0)
    throw DegenerateNormalizerError("operation_loss_missing: empty batch");

  OperationLossReport report;
  report.grad_rotation_logits = Matrix(batch.n * batch.dist_bins, batch.rot_classes);
  report.grad_score = Matrix(batch.n, batch.dist_bins);
  report.grad_width = Matrix(batch.n, batch.dist_bins);

  const double n_cls = resolve_normalizer(weights.n_cls, batch.n,
                                          "operation_loss_missing: N_cls");
  const double n_reg = resolve_normalizer(weights.n_reg, batch.n,
                                          "operation_loss_missing: N_reg");

  for (std::size_t d = 0; d < batch.dist_bins; ++d) {
    double rot_sum = 0.0, score_sum = 0.0, width_sum = 0.0;
    for (std::size_t i = 0; i < batch.n; ++i) {
      const std::size_t row = batch.rot_row(i, d);
      if (batch.has_truth[i]) {
        const auto rot = sigmoid_ce(
            batch.rotation_logits.row(row),
            static_cast<std::size_t>(batch.rotation_truth[row]));
        rot_sum += rot.value;
        for (std::size_t k = 0; k < batch.rot_classes; ++k)
          report.grad_rotation_logits.at(row, k) = rot.grad[k] / n_cls;

        const auto sc =
            smooth_l1(batch.score_pred.at(i, d), batch.score_truth.at(i, d));
        score_sum += sc.value;
        report.grad_score.at(i, d) = weights.beta2 * sc.grad / n_reg;

        const auto wd =
            smooth_l1(batch.width_pred.at(i, d), batch.width_truth.at(i, d));
        width_sum += wd.value;
        report.grad_width.at(i, d) = weights.beta3 * wd.grad / n_reg;
      } else {
        const auto rot = detail::smoothed_self_target_term(
            batch.rotation_logits.row(row), config.gamma, config.xi);
        rot_sum += rot.value;
        if (rot.gated_in)
          for (std::size_t k = 0; k < batch.rot_classes; ++k)
            report.grad_rotation_logits.at(row, k) = rot.grad[k] / n_cls;

        const auto sc = binned_self_target_term(
            batch.score_pred.at(i, d), batch.score_bins, config.gamma, config.xi);
        score_sum += sc.value;
        report.grad_score.at(i, d) = weights.beta2 * sc.grad / n_reg;

        const auto wd = binned_self_target_term(
            batch.width_pred.at(i, d), batch.width_bins, config.gamma, config.xi);
        width_sum += wd.value;
        report.grad_width.at(i, d) = weights.beta3 * wd.grad / n_reg;
      }
    }
    report.value += rot_sum / n_cls + weights.beta2 * score_sum / n_reg +
                    weights.beta3 * width_sum / n_reg;
  }
  return report;
}

OperationLossReport operation_loss_noisy(const OperationBatch& batch,
                                         const NoisyLossConfig& config,
                                         const CompositeWeights& weights) {
  batch.validate();
  config.validate();
  if (batch.n == 0)
    throw DegenerateNormalizerError("operation_loss_noisy: empty batch");
  for (bool present : batch.has_truth)
    if (!present)
      throw InvalidInputError(
          "operation_loss_noisy: missing truths (use the missing-GT loss)");

  OperationLossReport report;
  report.grad_rotation_logits = Matrix(batch.n * batch.dist_bins, batch.rot_classes);
  report.grad_score = Matrix(batch.n, batch.dist_bins);
  report.grad_width = Matrix(batch.n, batch.dist_bins);

  const double n_cls = resolve_normalizer(weights.n_cls, batch.n,
                                          "operation_loss_noisy: N_cls");
  const double n_reg = resolve_normalizer(weights.n_reg, batch.n,
                                          "operation_loss_noisy: N_reg");

  for (std::size_t d = 0; d < batch.dist_bins; ++d) {
    double rot_sum = 0.0, score_sum = 0.0, width_sum = 0.0;
    for (std::size_t i = 0; i < batch.n; ++i) {
      const std::size_t row = batch.rot_row(i, d);
      const auto rot = symmetric_term(
          batch.rotation_logits.row(row),
          static_cast<std::size_t>(batch.rotation_truth[row]), config);
      rot_sum += rot.value;
      for (std::size_t k = 0; k < batch.rot_classes; ++k)
        report.grad_rotation_logits.at(row, k) = rot.grad[k] / n_cls;

      const auto sc = binned_symmetric_term(batch.score_pred.at(i, d),
                                            batch.score_truth.at(i, d),
                                            batch.score_bins, config);
      score_sum += sc.value;
      report.grad_score.at(i, d) = weights.eta2 * sc.grad / n_reg;

      const auto wd = binned_symmetric_term(batch.width_pred.at(i, d),
                                            batch.width_truth.at(i, d),
                                            batch.width_bins, config);
      width_sum += wd.value;
      report.grad_width.at(i, d) = weights.eta3 * wd.grad / n_reg;
    }
    report.value += rot_sum / n_cls + weights.eta2 * score_sum / n_reg +
                    weights.eta3 * width_sum / n_reg;
  }
  return report;
}

namespace {

nlohmann::ordered_json matrix_to_json(const Matrix& m) {
  nlohmann::ordered_json doc;
  doc["rows"] = m.rows();
  doc["cols"] = m.cols();
  doc["data"] = std::vector<double>(m.flat().begin(), m.flat().end());
  return doc;
}

Matrix matrix_from_json(const nlohmann::json& doc) {
  Matrix m(doc.at("rows").get<std::size_t>(), doc.at("cols").get<std::size_t>());
  const auto data = doc.at("data").get<std::vector<double>>();
  if (data.size() != m.size())
    throw SizeMismatchError("matrix_from_json: data length");
  std::copy(data.begin(), data.end(), m.flat().begin());
  return m;
}

nlohmann::ordered_json binning_to_json(const ValueBinning& b) {
  nlohmann::ordered_json doc;
  doc["edges"] = b.edges;
  doc["tau"] = b.tau;
  return doc;
}

ValueBinning binning_from_json(const nlohmann::json& doc) {
  ValueBinning b;
  b.edges = doc.at("edges").get<std::vector<double>>();
  b.tau = doc.at("tau").get<double>();
  return b;
}

std::vector<std::array<double, 3>> vecs_from_json(const nlohmann::json& doc) {
  return doc.get<std::vector<std::array<double, 3>>>();
}

}  // namespace

nlohmann::ordered_json grasp_candidate_batch_to_json(
    const GraspCandidateBatch& batch) {
  nlohmann::ordered_json doc;
  doc["n"] = batch.n;
  doc["views"] = batch.views;
  doc["graspable_logits"] = matrix_to_json(batch.graspable_logits);
  doc["graspable_truth"] = batch.graspable_truth;
  doc["view_scores"] = matrix_to_json(batch.view_scores);
  doc["view_score_truth"] = matrix_to_json(batch.view_score_truth);
  doc["has_score_truth"] = std::vector<int>(batch.has_score_truth.begin(),
                                            batch.has_score_truth.end());
  doc["pred_approach"] = batch.pred_approach;
  doc["true_approach"] = batch.true_approach;
  doc["score_bins"] = binning_to_json(batch.score_bins);
  return doc;
}

GraspCandidateBatch grasp_candidate_batch_from_json(const nlohmann::json& doc) {
  GraspCandidateBatch batch;
  batch.n = doc.at("n").get<std::size_t>();
  batch.views = doc.at("views").get<std::size_t>();
  batch.graspable_logits = matrix_from_json(doc.at("graspable_logits"));
  batch.graspable_truth = doc.at("graspable_truth").get<std::vector<int>>();
  batch.view_scores = matrix_from_json(doc.at("view_scores"));
  batch.view_score_truth = matrix_from_json(doc.at("view_score_truth"));
  for (int v : doc.at("has_score_truth").get<std::vector<int>>())
    batch.has_score_truth.push_back(v != 0);
  batch.pred_approach = vecs_from_json(doc.at("pred_approach"));
  batch.true_approach = vecs_from_json(doc.at("true_approach"));
  batch.score_bins = binning_from_json(doc.at("score_bins"));
  batch.validate();
  return batch;
}

nlohmann::ordered_json operation_batch_to_json(const OperationBatch& batch) {
  nlohmann::ordered_json doc;
  doc["n"] = batch.n;
  doc["dist_bins"] = batch.dist_bins;
  doc["rot_classes"] = batch.rot_classes;
  doc["rotation_logits"] = matrix_to_json(batch.rotation_logits);
  doc["score_pred"] = matrix_to_json(batch.score_pred);
  doc["width_pred"] = matrix_to_json(batch.width_pred);
  doc["rotation_truth"] = batch.rotation_truth;
  doc["score_truth"] = matrix_to_json(batch.score_truth);
  doc["width_truth"] = matrix_to_json(batch.width_truth);
  doc["has_truth"] =
      std::vector<int>(batch.has_truth.begin(), batch.has_truth.end());
  doc["score_bins"] = binning_to_json(batch.score_bins);
  doc["width_bins"] = binning_to_json(batch.width_bins);
  return doc;
}

OperationBatch operation_batch_from_json(const nlohmann::json& doc) {
  OperationBatch batch;
  batch.n = doc.at("n").get<std::size_t>();
  batch.dist_bins = doc.at("dist_bins").get<std::size_t>();
  batch.rot_classes = doc.at("rot_classes").get<std::size_t>();
  batch.rotation_logits = matrix_from_json(doc.at("rotation_logits"));
  batch.score_pred = matrix_from_json(doc.at("score_pred"));
  batch.width_pred = matrix_from_json(doc.at("width_pred"));
  batch.rotation_truth = doc.at("rotation_truth").get<std::vector<int>>();
  batch.score_truth = matrix_from_json(doc.at("score_truth"));
  batch.width_truth = matrix_from_json(doc.at("width_truth"));
  for (int v : doc.at("has_truth").get<std::vector<int>>())
    batch.has_truth.push_back(v != 0);
  batch.score_bins = binning_from_json(doc.at("score_bins"));
  batch.width_bins = binning_from_json(doc.at("width_bins"));
  batch.validate();
  return batch;
}

}  // namespace robloss

#pragma once

#include <array>
#include <cstddef>
#include <vector>

#include "json.hpp"
#include "robloss/grasp.hpp"
#include "robloss/losses.hpp"
#include "robloss/matrix.hpp"

namespace robloss {

/// Grasp-head losses: the approach-head loss with its missing-ground-truth
/// branch, and the operation-head loss in missing- and noisy-ground-truth
/// variants, evaluated over synthetic grasp-candidate batches.

/// Value bins that turn a continuous score/width quantity into a
/// categorical distribution so the distribution-based losses apply to it.
/// Predictions map to bin logits through a Gaussian kernel around each bin
/// center, logit_c(x) = -((x - center_c) / tau)^2 / 2, which keeps the
/// losses differentiable in the raw prediction; truths map to the hard bin
/// index. tau defaults to the bin width.
struct ValueBinning {
  std::vector<double> edges;  // ascending, size = bins + 1
  double tau = 0.0;

  static ValueBinning uniform(double lo, double hi, std::size_t bins);
  std::size_t bins() const { return edges.empty() ? 0 : edges.size() - 1; }
  double center(std::size_t c) const { return 0.5 * (edges[c] + edges[c + 1]); }
  std::vector<double> soft_logits(double x) const;
  /// d soft_logits[c] / dx
  std::vector<double> soft_logit_grads(double x) const;
  std::size_t hard_bin(double x) const;
  void validate() const;
};

/// Candidates for the approach head. Score truths may be absent per sample
/// (the MCAR mask removes a sample's whole target record); graspability
/// truth and true approach vectors always accompany the candidates since
/// the head's gates are built from them.
struct GraspCandidateBatch {
  std::size_t n = 0;      // candidate points
  std::size_t views = 0;  // viewpoints per point
  Matrix graspable_logits;              // n x 2
  std::vector<int> graspable_truth;     // n, each 0 or 1
  Matrix view_scores;                   // n x views, raw predicted scores
  Matrix view_score_truth;              // n x views, valid where has_score_truth
  std::vector<bool> has_score_truth;    // per sample
  std::vector<Vec3> pred_approach;      // n * views, row-major over (i, j)
  std::vector<Vec3> true_approach;      // n * views
  ValueBinning score_bins;

  void validate() const;
};

/// Per-sample, per-distance-bin predictions of the operation head.
/// Rotation is a native classification over rot_classes; score and width
/// are scalars binned through the batch's ValueBinning when a
/// distribution-based loss needs them.
struct OperationBatch {
  std::size_t n = 0;
  std::size_t dist_bins = 0;
  std::size_t rot_classes = 0;
  Matrix rotation_logits;            // (n * dist_bins) x rot_classes
  Matrix score_pred;                 // n x dist_bins
  Matrix width_pred;                 // n x dist_bins
  std::vector<int> rotation_truth;   // n * dist_bins, valid where has_truth
  Matrix score_truth;                // n x dist_bins
  Matrix width_truth;                // n x dist_bins
  std::vector<bool> has_truth;       // per sample
  ValueBinning score_bins;
  ValueBinning width_bins;

  std::size_t rot_row(std::size_t i, std::size_t d) const {
    return i * dist_bins + d;
  }
  void validate() const;
};

/// Term weights and normalizer overrides. Normalizers of 0 mean "derive
/// from the batch": the count of classification terms and of gate-passing
/// regression terms respectively.
struct CompositeWeights {
  double beta1 = 0.5;
  double beta2 = 1.0;
  double beta3 = 1.0;
  double eta2 = 1.0;
  double eta3 = 1.0;
  std::size_t n_cls = 0;
  std::size_t n_reg = 0;
};

/// Angle gate of the approach head, degrees.
inline constexpr double kApproachAngleGateDeg = 5.0;

/// Smooth L1: 0.5 x^2 for |x| < 1, |x| - 0.5 otherwise, x = pred - truth.
struct SmoothL1Result {
  double value = 0.0;
  double grad = 0.0;  // d value / d pred
};
SmoothL1Result smooth_l1(double pred, double truth);

/// Cross entropy over the softmax of two logits.
struct TwoClassResult {
  double value = 0.0;
  std::array<double, 2> grad{0.0, 0.0};
};
TwoClassResult two_class_softmax_loss(const std::array<double, 2>& logits,
                                      int truth);

/// Stable per-class sigmoid cross entropy, summed over classes, against a
/// one-hot truth index. Gradient per class: sigmoid(z) - y.
struct SigmoidCeResult {
  double value = 0.0;
  std::vector<double> grad;
};
SigmoidCeResult sigmoid_ce(std::span<const double> logits, std::size_t truth);

struct ApproachLossReport {
  double value = 0.0;
  Matrix grad_graspable;    // n x 2
  Matrix grad_view_scores;  // n x views
};

/// Approach-head loss: mean two-class graspability loss plus the
/// angle-gated score term. Gate: truth-positive point and predicted vs true
/// approach angle strictly below 5 degrees. Gated-in terms use smooth L1
/// against the score truth when it is present and the confidence-gated
/// smoothed self-target on the binned score distribution when it is masked.
ApproachLossReport approach_loss(const GraspCandidateBatch& batch,
                                 const MissingLossConfig& config,
                                 const CompositeWeights& weights);

struct OperationLossReport {
  double value = 0.0;
  Matrix grad_rotation_logits;  // (n * dist_bins) x rot_classes
  Matrix grad_score;            // n x dist_bins
  Matrix grad_width;            // n x dist_bins
};

/// Operation-head loss for missing ground truth: per distance bin, the mean
/// sigmoid cross entropy of the rotation classes plus weighted mean smooth
/// L1 of score and width, with masked samples routed to the smoothed
/// self-target branch; summed over bins.
OperationLossReport operation_loss_missing(const OperationBatch& batch,
                                           const MissingLossConfig& config,
                                           const CompositeWeights& weights);

/// Operation-head loss for noisy ground truth: every term becomes
/// alpha1 * L_ce + alpha2 * L_rce over the class (or value-bin)
/// distribution. Requires all truths present.
OperationLossReport operation_loss_noisy(const OperationBatch& batch,
                                         const NoisyLossConfig& config,
                                         const CompositeWeights& weights);

nlohmann::ordered_json grasp_candidate_batch_to_json(const GraspCandidateBatch&);
GraspCandidateBatch grasp_candidate_batch_from_json(const nlohmann::json&);
nlohmann::ordered_json operation_batch_to_json(const OperationBatch&);
OperationBatch operation_batch_from_json(const nlohmann::json&);

}  // namespace robloss

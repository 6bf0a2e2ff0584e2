#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "robloss/errors.hpp"

namespace robloss {

enum class CorruptionKind { kMcar, kMultiplicative, kLabelFlip };

std::string to_string(CorruptionKind kind);
CorruptionKind corruption_kind_from_string(const std::string& name);

/// Seeded, reproducible description of which targets are corrupted.
/// affected holds exactly round(ratio * n) unique sorted indices, drawn
/// without replacement by a partial Fisher-Yates shuffle over a SplitMix64
/// stream seeded with `seed`; identical inputs give identical plans on
/// every platform.
struct CorruptionPlan {
  CorruptionKind kind = CorruptionKind::kMcar;
  double ratio = 0.0;       // kappa_1 (mcar) or kappa_2 (noise)
  double factor = 1.0;      // epsilon; multiplicative only
  std::uint64_t seed = 0;
  std::size_t n = 0;
  std::vector<std::size_t> affected;  // sorted, unique, < n
};

CorruptionPlan plan_corruption(std::size_t n, CorruptionKind kind, double ratio,
                               double factor, std::uint64_t seed);

/// Removes the targets at the plan's affected indices. Result holds a value
/// exactly where the mask is true.
template <typename Target>
std::vector<std::optional<Target>> apply_mcar(const std::vector<Target>& targets,
                                              const CorruptionPlan& plan);

/// Multiplies every entry of each affected row by plan.factor; other rows
/// are returned untouched (bitwise identical).
std::vector<std::vector<double>> apply_multiplicative_noise(
    std::vector<std::vector<double>> target_rows, const CorruptionPlan& plan);

/// Replaces each affected label by a uniformly random different class.
/// The flip stream is seeded with plan.seed ^ stream_tag::kLabelFlip and
/// consumed in ascending index order.
std::vector<int> apply_label_flip(std::vector<int> labels,
                                  const CorruptionPlan& plan, int num_classes);

/// JSON document with fixed field order {kind, ratio, factor, seed, n,
/// affected_indices}.
nlohmann::ordered_json plan_to_json(const CorruptionPlan& plan);
CorruptionPlan plan_from_json(const nlohmann::json& doc);

// --- template implementation ---

template <typename Target>
std::vector<std::optional<Target>> apply_mcar(const std::vector<Target>& targets,
                                              const CorruptionPlan& plan) {
  if (plan.kind != CorruptionKind::kMcar)
    throw InvalidInputError("apply_mcar: plan kind is not mcar");
  if (targets.size() != plan.n)
    throw SizeMismatchError("apply_mcar: plan sized for a different dataset");
  std::vector<std::optional<Target>> out(targets.begin(), targets.end());
  for (std::size_t idx : plan.affected) out[idx].reset();
  return out;
}

}  // namespace robloss

#include "robloss/corruption.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "robloss/rng.hpp"

namespace robloss {

std::string to_string(CorruptionKind kind) {
  switch (kind) {
    case CorruptionKind::kMcar: return "mcar";
    case CorruptionKind::kMultiplicative: return "multiplicative";
    case CorruptionKind::kLabelFlip: return "label_flip";
  }
  throw InvalidInputError("to_string: unknown CorruptionKind");
}

CorruptionKind corruption_kind_from_string(const std::string& name) {
  if (name == "mcar") return CorruptionKind::kMcar;
  if (name == "multiplicative") return CorruptionKind::kMultiplicative;
  if (name == "label_flip" || name == "label-flip")
    return CorruptionKind::kLabelFlip;
  throw InvalidInputError("unknown corruption kind: " + name);
}

CorruptionPlan plan_corruption(std::size_t n, CorruptionKind kind, double ratio,
                               double factor, std::uint64_t seed) {
  if (!(ratio >= 0.0 && ratio <= 1.0))
    throw InvalidInputError("plan_corruption: ratio outside [0, 1]");
  CorruptionPlan plan;
  plan.kind = kind;
  plan.ratio = ratio;
  plan.factor = factor;
  plan.seed = seed;
  plan.n = n;

  const auto count = static_cast<std::size_t>(std::min<long long>(
      static_cast<long long>(n),
      std::llround(ratio * static_cast<double>(n))));

  // partial Fisher-Yates: first `count` positions of a seeded shuffle
  std::vector<std::size_t> indices(n);
  std::iota(indices.begin(), indices.end(), std::size_t{0});
  SplitMix64 rng(seed);
  for (std::size_t i = 0; i < count; ++i) {
    const std::size_t j = i + static_cast<std::size_t>(rng.bounded(n - i));
    std::swap(indices[i], indices[j]);
  }
  plan.affected.assign(indices.begin(),
                       indices.begin() + static_cast<std::ptrdiff_t>(count));
  std::sort(plan.affected.begin(), plan.affected.end());
  return plan;
}

std::vector<std::vector<double>> apply_multiplicative_noise(
    std::vector<std::vector<double>> target_rows, const CorruptionPlan& plan) {
  if (plan.kind != CorruptionKind::kMultiplicative)
    throw InvalidInputError("apply_multiplicative_noise: wrong plan kind");
  if (target_rows.size() != plan.n)
    throw SizeMismatchError("apply_multiplicative_noise: size mismatch");
  for (std::size_t idx : plan.affected)
    for (double& v : target_rows[idx]) v *= plan.factor;
  return target_rows;
}

std::vector<int> apply_label_flip(std::vector<int> labels,
                                  const CorruptionPlan& plan, int num_classes) {
  if (plan.kind != CorruptionKind::kLabelFlip)
    throw InvalidInputError("apply_label_flip: wrong plan kind");
  if (labels.size() != plan.n)
    throw SizeMismatchError("apply_label_flip: size mismatch");
  if (num_classes < 2)
    throw InvalidInputError("apply_label_flip: need at least 2 classes");
  SplitMix64 rng(plan.seed ^ stream_tag::kLabelFlip);
  for (std::size_t idx : plan.affected) {
    const int offset =
        1 + static_cast<int>(rng.bounded(static_cast<std::uint64_t>(num_classes - 1)));
    labels[idx] = (labels[idx] + offset) % num_classes;
  }
  return labels;
}

nlohmann::ordered_json plan_to_json(const CorruptionPlan& plan) {
  nlohmann::ordered_json doc;
  doc["kind"] = to_string(plan.kind);
  doc["ratio"] = plan.ratio;
  doc["factor"] = plan.factor;
  doc["seed"] = plan.seed;
  doc["n"] = plan.n;
  doc["affected_indices"] = plan.affected;
  return doc;
}

CorruptionPlan plan_from_json(const nlohmann::json& doc) {
  CorruptionPlan plan;
  plan.kind = corruption_kind_from_string(doc.at("kind").get<std::string>());
  plan.ratio = doc.at("ratio").get<double>();
  plan.factor = doc.at("factor").get<double>();
  plan.seed = doc.at("seed").get<std::uint64_t>();
  plan.n = doc.at("n").get<std::size_t>();
  plan.affected = doc.at("affected_indices").get<std::vector<std::size_t>>();
  if (!std::is_sorted(plan.affected.begin(), plan.affected.end()))
    throw InvalidInputError("plan_from_json: affected_indices not sorted");
  for (std::size_t idx : plan.affected)
    if (idx >= plan.n)
      throw InvalidInputError("plan_from_json: index out of bounds");
  return plan;
}

}  // namespace robloss

#include "robloss/prob.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace robloss {

namespace detail {

void require_finite(std::span<const double> values, const char* what) {
  for (double v : values) {
    if (!std::isfinite(v))
      throw InvalidInputError(std::string(what) + ": non-finite entry");
  }
}

}  // namespace detail

std::vector<double> softmax(std::span<const double> logits) {
  if (logits.size() < 2)
    throw DegenerateDimensionError("softmax: need at least 2 classes");
  detail::require_finite(logits, "softmax");
  const double m = *std::max_element(logits.begin(), logits.end());
  std::vector<double> out(logits.size());
  double z = 0.0;
  for (std::size_t i = 0; i < logits.size(); ++i) {
    out[i] = std::exp(logits[i] - m);
    z += out[i];
  }
  for (double& v : out) v /= z;
  return out;
}

std::vector<double> log_softmax(std::span<const double> logits) {
  if (logits.size() < 2)
    throw DegenerateDimensionError("log_softmax: need at least 2 classes");
  detail::require_finite(logits, "log_softmax");
  const double m = *std::max_element(logits.begin(), logits.end());
  double z = 0.0;
  for (double v : logits) z += std::exp(v - m);
  const double log_z = std::log(z);
  std::vector<double> out(logits.size());
  for (std::size_t i = 0; i < logits.size(); ++i)
    out[i] = logits[i] - m - log_z;
  return out;
}

std::vector<double> smooth_distribution(std::span<const double> probs, double xi) {
  if (probs.size() < 2)
    throw DegenerateDimensionError(
        "smooth_distribution: C = 1 (formula divides by C - 1)");
  if (!(xi >= 0.0 && xi <= 1.0))
    throw InvalidInputError("smooth_distribution: xi outside [0, 1]");
  if (!is_prob_vector(probs))
    throw InvalidInputError("smooth_distribution: input is not a ProbVector");
  const double off = (1.0 - xi) / (static_cast<double>(probs.size()) - 1.0);
  std::vector<double> out(probs.size());
  for (std::size_t i = 0; i < probs.size(); ++i)
    out[i] = xi * probs[i] + off * (1.0 - probs[i]);
  return out;
}

bool confidence_gate(std::span<const double> probs, double gamma) {
  if (!(gamma >= 0.0 && gamma <= 1.0))
    throw InvalidInputError("confidence_gate: gamma outside [0, 1]");
  const double m = *std::max_element(probs.begin(), probs.end());
  return m > gamma;
}

std::size_t argmax_label(std::span<const double> probs) {
  // max_element already keeps the first of equal maxima.
  return static_cast<std::size_t>(
      std::max_element(probs.begin(), probs.end()) - probs.begin());
}

bool is_prob_vector(std::span<const double> p, double tol) {
  double sum = 0.0;
  for (double v : p) {
    if (!std::isfinite(v) || v < -tol || v > 1.0 + tol) return false;
    sum += v;
  }
  return std::abs(sum - 1.0) <= tol;
}

}  // namespace robloss

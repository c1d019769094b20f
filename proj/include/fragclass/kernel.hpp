#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <string>

namespace fragclass {

enum class KernelFamily { gaussian, box };

/// Kernel used in the per-pattern vote sums. Both families are regular:
/// nonnegative, bounded below on a ball at the origin, with finite
/// radial-sup integral.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian;
};

inline std::string to_string(KernelFamily f) {
  return f == KernelFamily::gaussian ? "gaussian" : "box";
}

inline KernelFamily kernel_family_from_string(const std::string& s) {
  if (s == "gaussian") return KernelFamily::gaussian;
  if (s == "box") return KernelFamily::box;
  throw std::invalid_argument("unknown kernel family '" + s + "'");
}

/// Evaluate the kernel at u. Gaussian: exp(-|u|^2/2), unnormalized since only
/// the sign of the vote matters. Box: indicator of the closed unit ball.
inline double kernel_eval(const KernelSpec& spec, std::span<const double> u) {
  double sq = 0.0;
  for (double v : u) sq += v * v;
  if (spec.family == KernelFamily::gaussian) return std::exp(-0.5 * sq);
  return sq <= 1.0 ? 1.0 : 0.0;
}

/// Same, from a precomputed squared norm. Shared by the selection search,
/// which accumulates pairwise squared distances dimension by dimension.
inline double kernel_eval_sq(const KernelSpec& spec, double squared_norm) {
  if (spec.family == KernelFamily::gaussian) return std::exp(-0.5 * squared_norm);
  return squared_norm <= 1.0 ? 1.0 : 0.0;
}

}  // namespace fragclass

// SPDX-License-Identifier: Apache-2.0
//
// Reference implementations. The SIMD variants must reproduce these exactly.
#include <cmath>

#include "detail.hpp"

namespace iscc::kernels::detail {
namespace {

void squared_distances(PointColumns pts, const Vec3& q, std::span<double> out) {
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double dx = pts.x[i] - q[0];
    const double dy = pts.y[i] - q[1];
    const double dz = pts.z[i] - q[2];
    out[i] = (dx * dx + dy * dy) + dz * dz;
  }
}

std::size_t fps_update(PointColumns pts, const Vec3& q, std::span<double> min_d) {
  std::size_t best = 0;
  double best_d = -1.0;
  bool first = true;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    if (min_d[i] >= 0.0) {
      const double dx = pts.x[i] - q[0];
      const double dy = pts.y[i] - q[1];
      const double dz = pts.z[i] - q[2];
      const double d = (dx * dx + dy * dy) + dz * dz;
      if (d < min_d[i]) min_d[i] = d;
    }
    if (first || min_d[i] > best_d) {
      best_d = min_d[i];
      best = i;
      first = false;
    }
  }
  return best;
}

std::size_t argmax_dot(PointColumns dirs, const Vec3& u) {
  std::size_t best = 0;
  double best_v = 0.0;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    const double v = (dirs.x[i] * u[0] + dirs.y[i] * u[1]) + dirs.z[i] * u[2];
    if (i == 0 || v > best_v) {
      best_v = v;
      best = i;
    }
  }
  return best;
}

void surrogate_batch(double floor_cm, double kappa, double jitter_cm_unit,
                     std::span<const double> p, std::span<double> out) {
  for (std::size_t i = 0; i < p.size(); ++i) {
    out[i] = floor_cm + kappa * (jitter_cm_unit / std::sqrt(p[i]));
  }
}

}  // namespace

const KernelTable& scalar_kernels() {
  static const KernelTable table{Isa::Scalar, squared_distances, fps_update, argmax_dot,
                                 surrogate_batch};
  return table;
}

}  // namespace iscc::kernels::detail

// SPDX-License-Identifier: Apache-2.0
//
// Data-parallel inner loops with a scalar reference and SIMD variants chosen at
// runtime. Every variant evaluates the same expression tree in the same order,
// so results are bit-identical across variants (the build disables FMA
// contraction).
#pragma once

#include <cstddef>
#include <span>
#include <string_view>

#include "iscc/geometry.hpp"

namespace iscc::kernels {

enum class Isa { Scalar, Avx2 };

std::string_view name(Isa isa);

/// Points stored as three coordinate columns of equal length.
struct PointColumns {
  std::span<const double> x, y, z;
  std::size_t size() const { return x.size(); }
};

struct KernelTable {
  Isa isa;
  /// out[i] = |p_i - q|^2 evaluated as (dx*dx + dy*dy) + dz*dz
  void (*squared_distances)(PointColumns pts, const Vec3& q, std::span<double> out);
  /// min_d[i] = min(min_d[i], |p_i - q|^2) for entries >= 0 (negative marks a
  /// selected point and is left alone). Returns the index of the largest min_d,
  /// lowest index on ties.
  std::size_t (*fps_update)(PointColumns pts, const Vec3& q, std::span<double> min_d);
  /// Index of max (x_i*u0 + y_i*u1) + z_i*u2, lowest index on ties.
  std::size_t (*argmax_dot)(PointColumns dirs, const Vec3& u);
  /// out[i] = floor_cm + kappa * (jitter_cm_unit / sqrt(p_i))
  void (*surrogate_batch)(double floor_cm, double kappa, double jitter_cm_unit,
                          std::span<const double> p, std::span<double> out);
};

const KernelTable& scalar_table();

/// nullptr when the variant was not compiled in or the CPU lacks the feature.
const KernelTable* table_for(Isa isa);

/// Best variant for this CPU unless overridden with `force`.
const KernelTable& active();

/// Pin the active variant (tests and benchmarks). Throws ArgumentError if unavailable.
void force(Isa isa);
void reset();

}  // namespace iscc::kernels

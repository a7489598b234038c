// SPDX-License-Identifier: Apache-2.0
//
// AVX2 variants, four doubles per lane group. Built with -mavx2 only; callers
// reach these through the dispatch table after a CPUID check.
#include <immintrin.h>

#include <cmath>
#include <cstdint>

#include "detail.hpp"

namespace iscc::kernels::detail {
namespace {

constexpr std::size_t kW = 4;

inline __m256d sq_dist(__m256d x, __m256d y, __m256d z, __m256d qx, __m256d qy, __m256d qz) {
  const __m256d dx = _mm256_sub_pd(x, qx);
  const __m256d dy = _mm256_sub_pd(y, qy);
  const __m256d dz = _mm256_sub_pd(z, qz);
  return _mm256_add_pd(_mm256_add_pd(_mm256_mul_pd(dx, dx), _mm256_mul_pd(dy, dy)),
                       _mm256_mul_pd(dz, dz));
}

// Lane-wise running argmax: strict > keeps the earliest index within a lane.
struct LaneArgmax {
  __m256d best_v = _mm256_set1_pd(-INFINITY);
  __m256i best_i = _mm256_set1_epi64x(-1);

  void update(__m256d v, __m256i idx) {
    const __m256d gt = _mm256_cmp_pd(v, best_v, _CMP_GT_OQ);
    best_v = _mm256_blendv_pd(best_v, v, gt);
    best_i = _mm256_castpd_si256(
        _mm256_blendv_pd(_mm256_castsi256_pd(best_i), _mm256_castsi256_pd(idx), gt));
  }

  // Largest value across lanes, smallest index among equal values.
  void reduce(double& v_out, std::int64_t& i_out) const {
    alignas(32) double v[kW];
    alignas(32) std::int64_t ix[kW];
    _mm256_store_pd(v, best_v);
    _mm256_store_si256(reinterpret_cast<__m256i*>(ix), best_i);
    v_out = -INFINITY;
    i_out = -1;
    for (std::size_t l = 0; l < kW; ++l) {
      if (ix[l] < 0) continue;
      if (i_out < 0 || v[l] > v_out || (v[l] == v_out && ix[l] < i_out)) {
        v_out = v[l];
        i_out = ix[l];
      }
    }
  }
};

void squared_distances(PointColumns pts, const Vec3& q, std::span<double> out) {
  const std::size_t n = pts.size();
  const __m256d qx = _mm256_set1_pd(q[0]);
  const __m256d qy = _mm256_set1_pd(q[1]);
  const __m256d qz = _mm256_set1_pd(q[2]);
  std::size_t i = 0;
  for (; i + kW <= n; i += kW) {
    const __m256d d = sq_dist(_mm256_loadu_pd(&pts.x[i]), _mm256_loadu_pd(&pts.y[i]),
                              _mm256_loadu_pd(&pts.z[i]), qx, qy, qz);
    _mm256_storeu_pd(&out[i], d);
  }
  for (; i < n; ++i) {
    const double dx = pts.x[i] - q[0];
    const double dy = pts.y[i] - q[1];
    const double dz = pts.z[i] - q[2];
    out[i] = (dx * dx + dy * dy) + dz * dz;
  }
}

std::size_t fps_update(PointColumns pts, const Vec3& q, std::span<double> min_d) {
  const std::size_t n = pts.size();
  const __m256d qx = _mm256_set1_pd(q[0]);
  const __m256d qy = _mm256_set1_pd(q[1]);
  const __m256d qz = _mm256_set1_pd(q[2]);
  const __m256d zero = _mm256_setzero_pd();
  __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
  const __m256i step = _mm256_set1_epi64x(kW);

  LaneArgmax am;
  std::size_t i = 0;
  for (; i + kW <= n; i += kW) {
    const __m256d d = sq_dist(_mm256_loadu_pd(&pts.x[i]), _mm256_loadu_pd(&pts.y[i]),
                              _mm256_loadu_pd(&pts.z[i]), qx, qy, qz);
    const __m256d cur = _mm256_loadu_pd(&min_d[i]);
    const __m256d open = _mm256_cmp_pd(cur, zero, _CMP_GE_OQ);
    const __m256d lower = _mm256_and_pd(open, _mm256_cmp_pd(d, cur, _CMP_LT_OQ));
    const __m256d next = _mm256_blendv_pd(cur, d, lower);
    _mm256_storeu_pd(&min_d[i], next);
    am.update(next, idx);
    idx = _mm256_add_epi64(idx, step);
  }

  double best_v;
  std::int64_t best_i;
  am.reduce(best_v, best_i);
  for (; i < n; ++i) {
    if (min_d[i] >= 0.0) {
      const double dx = pts.x[i] - q[0];
      const double dy = pts.y[i] - q[1];
      const double dz = pts.z[i] - q[2];
      const double d = (dx * dx + dy * dy) + dz * dz;
      if (d < min_d[i]) min_d[i] = d;
    }
    if (best_i < 0 || min_d[i] > best_v) {
      best_v = min_d[i];
      best_i = static_cast<std::int64_t>(i);
    }
  }
  return best_i < 0 ? 0 : static_cast<std::size_t>(best_i);
}

std::size_t argmax_dot(PointColumns dirs, const Vec3& u) {
  const std::size_t n = dirs.size();
  const __m256d u0 = _mm256_set1_pd(u[0]);
  const __m256d u1 = _mm256_set1_pd(u[1]);
  const __m256d u2 = _mm256_set1_pd(u[2]);
  __m256i idx = _mm256_setr_epi64x(0, 1, 2, 3);
  const __m256i step = _mm256_set1_epi64x(kW);

  LaneArgmax am;
  std::size_t i = 0;
  for (; i + kW <= n; i += kW) {
    const __m256d v = _mm256_add_pd(
        _mm256_add_pd(_mm256_mul_pd(_mm256_loadu_pd(&dirs.x[i]), u0),
                      _mm256_mul_pd(_mm256_loadu_pd(&dirs.y[i]), u1)),
        _mm256_mul_pd(_mm256_loadu_pd(&dirs.z[i]), u2));
    am.update(v, idx);
    idx = _mm256_add_epi64(idx, step);
  }

  double best_v;
  std::int64_t best_i;
  am.reduce(best_v, best_i);
  for (; i < n; ++i) {
    const double v = (dirs.x[i] * u[0] + dirs.y[i] * u[1]) + dirs.z[i] * u[2];
    if (best_i < 0 || v > best_v) {
      best_v = v;
      best_i = static_cast<std::int64_t>(i);
    }
  }
  return best_i < 0 ? 0 : static_cast<std::size_t>(best_i);
}

void surrogate_batch(double floor_cm, double kappa, double jitter_cm_unit,
                     std::span<const double> p, std::span<double> out) {
  const std::size_t n = p.size();
  const __m256d f = _mm256_set1_pd(floor_cm);
  const __m256d k = _mm256_set1_pd(kappa);
  const __m256d j = _mm256_set1_pd(jitter_cm_unit);
  std::size_t i = 0;
  for (; i + kW <= n; i += kW) {
    const __m256d s = _mm256_sqrt_pd(_mm256_loadu_pd(&p[i]));
    _mm256_storeu_pd(&out[i], _mm256_add_pd(f, _mm256_mul_pd(k, _mm256_div_pd(j, s))));
  }
  for (; i < n; ++i) {
    out[i] = floor_cm + kappa * (jitter_cm_unit / std::sqrt(p[i]));
  }
}

}  // namespace

const KernelTable& avx2_kernels() {
  static const KernelTable table{Isa::Avx2, squared_distances, fps_update, argmax_dot,
                                 surrogate_batch};
  return table;
}

}  // namespace iscc::kernels::detail

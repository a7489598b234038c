// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cstring>
#include <random>
#include <vector>

#include "iscc/errors.hpp"
#include "iscc/kernels.hpp"

using namespace iscc;
using namespace iscc::kernels;

namespace {

struct Cloud {
  std::vector<double> x, y, z;
  PointColumns cols() const { return {x, y, z}; }
};

Cloud make_cloud(std::mt19937_64& rng, std::size_t n, bool ties) {
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  std::uniform_int_distribution<int> q(-2, 2);
  Cloud c;
  for (std::size_t i = 0; i < n; ++i) {
    c.x.push_back(ties ? q(rng) : u(rng));
    c.y.push_back(ties ? q(rng) : u(rng));
    c.z.push_back(ties ? q(rng) : u(rng));
  }
  return c;
}

bool same_bits(const std::vector<double>& a, const std::vector<double>& b) {
  return a.size() == b.size() && std::memcmp(a.data(), b.data(), a.size() * sizeof(double)) == 0;
}

std::vector<const KernelTable*> variants() {
  std::vector<const KernelTable*> v;
  if (const auto* t = table_for(Isa::Avx2)) v.push_back(t);
  return v;
}

}  // namespace

TEST_CASE("scalar table is always available and active() is usable") {
  CHECK(scalar_table().isa == Isa::Scalar);
  CHECK(table_for(Isa::Scalar) == &scalar_table());
  CHECK_FALSE(name(active().isa).empty());
  force(Isa::Scalar);
  CHECK(active().isa == Isa::Scalar);
  reset();
  if (table_for(Isa::Avx2) == nullptr) CHECK_THROWS_AS(force(Isa::Avx2), ArgumentError);
}

TEST_CASE("scalar kernels against direct evaluation") {
  std::mt19937_64 rng(1);
  const Cloud c = make_cloud(rng, 13, false);
  const Vec3 q{0.3, -0.2, 1.1};
  std::vector<double> d(13);
  scalar_table().squared_distances(c.cols(), q, d);
  for (std::size_t i = 0; i < 13; ++i) {
    const double dx = c.x[i] - q[0], dy = c.y[i] - q[1], dz = c.z[i] - q[2];
    CHECK(d[i] == (dx * dx + dy * dy) + dz * dz);
  }

  std::vector<double> min_d(13, 1e300);
  min_d[4] = -1.0;
  const std::size_t arg = scalar_table().fps_update(c.cols(), q, min_d);
  CHECK(min_d[4] == -1.0);
  double best = -1.0;
  std::size_t expect = 0;
  for (std::size_t i = 0; i < 13; ++i) {
    if (i == 4) continue;
    CHECK(min_d[i] == d[i]);
    if (d[i] > best) {
      best = d[i];
      expect = i;
    }
  }
  CHECK(arg == expect);

  const Cloud dirs{{1, 0, 0, 1}, {0, 1, 0, 0}, {0, 0, 1, 0}};
  CHECK(scalar_table().argmax_dot(dirs.cols(), {1, 0, 0}) == 0);  // tie between 0 and 3
  CHECK(scalar_table().argmax_dot(dirs.cols(), {0, 0.1, 0.9}) == 2);
}

TEST_CASE("SIMD kernels are bit-identical to the scalar reference") {
  const auto simd = variants();
  if (simd.empty()) {
    MESSAGE("no SIMD variant available on this machine; nothing to compare");
    return;
  }
  std::mt19937_64 rng(99);
  std::uniform_real_distribution<double> u(-2.0, 2.0);
  for (const KernelTable* t : simd) {
    for (std::size_t n = 0; n < 70; ++n) {
      for (bool ties : {false, true}) {
        const Cloud c = make_cloud(rng, n, ties);
        const Vec3 q{ties ? 0.0 : u(rng), ties ? 1.0 : u(rng), u(rng)};

        std::vector<double> a(n), b(n);
        scalar_table().squared_distances(c.cols(), q, a);
        t->squared_distances(c.cols(), q, b);
        CHECK(same_bits(a, b));

        if (n > 0) {
          std::vector<double> ma(n), mb;
          for (std::size_t i = 0; i < n; ++i) ma[i] = (i % 5 == 2) ? -1.0 : 4.0 * u(rng) + 4.0;
          mb = ma;
          const auto ia = scalar_table().fps_update(c.cols(), q, ma);
          const auto ib = t->fps_update(c.cols(), q, mb);
          CHECK(ia == ib);
          CHECK(same_bits(ma, mb));

          CHECK(scalar_table().argmax_dot(c.cols(), q) == t->argmax_dot(c.cols(), q));
        }

        std::vector<double> p(n), sa(n), sb(n);
        for (auto& v : p) v = 1e-4 + std::abs(u(rng));
        scalar_table().surrogate_batch(4.3, 0.05, 0.12, p, sa);
        t->surrogate_batch(4.3, 0.05, 0.12, p, sb);
        CHECK(same_bits(sa, sb));
      }
    }
  }
}

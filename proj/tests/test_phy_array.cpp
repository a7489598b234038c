// SPDX-License-Identifier: Apache-2.0
#include <doctest.h>

#include <cmath>
#include <complex>
#include <numbers>

#include "iscc/errors.hpp"
#include "iscc/phy_array.hpp"

using namespace iscc;

namespace {

// Per-user bisection on p: smallest p with p * g / sigma2 >= snr_min.
double bisect_power(double gain, double sigma2, double snr_min) {
  double lo = 0.0, hi = 1.0;
  while (hi * gain / sigma2 < snr_min) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    (mid * gain / sigma2 >= snr_min ? hi : lo) = mid;
  }
  return hi;
}

}  // namespace

TEST_CASE("steering vector at zero elevation is all ones") {
  const ArrayGeometry g{4, 4, 0.5};
  for (double theta : {0.0, 0.3, -1.1, 2.0}) {
    const cvec a = steering_vector(g, {theta, 0.0});
    REQUIRE(a.size() == 16);
    for (Eigen::Index i = 0; i < a.size(); ++i) {
      CHECK(a(i).real() == 1.0);
      CHECK(a(i).imag() == 0.0);
    }
  }
}

TEST_CASE("two-element array at broadside elevation alternates sign") {
  const cvec a = steering_vector({2, 1, 0.5}, {0.0, std::numbers::pi / 2});
  CHECK(std::abs(a(0) - std::complex<double>(1, 0)) < 1e-12);
  CHECK(std::abs(a(1) - std::complex<double>(-1, 0)) < 1e-12);
}

TEST_CASE("steering vector entries are unit modulus with norm sqrt(N)") {
  const ArrayGeometry g{3, 5, 0.37};
  for (double t = -1.5; t < 1.5; t += 0.31) {
    for (double p = -1.5; p < 1.5; p += 0.29) {
      const cvec a = steering_vector(g, {t, p});
      for (Eigen::Index i = 0; i < a.size(); ++i) CHECK(std::abs(std::abs(a(i)) - 1.0) < 1e-12);
      CHECK(std::abs(a.norm() - std::sqrt(15.0)) < 1e-12);
    }
  }
}

TEST_CASE("steering vector is the Kronecker product of the two axis responses") {
  const ArrayGeometry g{4, 3, 0.5};
  const BeamDirection d{0.4, 0.7};
  const double k = 2 * std::numbers::pi * 0.5;
  const cvec a = steering_vector(g, d);
  for (int m = 0; m < 4; ++m) {
    for (int n = 0; n < 3; ++n) {
      const auto ax = std::polar(1.0, k * m * std::sin(d.elevation_phi) * std::cos(d.azimuth_theta));
      const auto az = std::polar(1.0, k * n * std::sin(d.elevation_phi));
      CHECK(std::abs(a(m * 3 + n) - ax * az) < 1e-12);
    }
  }
}

TEST_CASE("invalid geometry is rejected") {
  CHECK_THROWS_AS(steering_vector({0, 4, 0.5}, {}), ArgumentError);
  CHECK_THROWS_AS(steering_vector({4, 4, 0.0}, {}), ArgumentError);
}

TEST_CASE("codebook size and ordering") {
  const ArrayGeometry g{4, 4, 0.5};
  const std::vector<double> one{0.0};
  CHECK(build_codebook(g, one, one).entries.size() == 1);

  std::vector<double> az(8), el(4);
  for (int i = 0; i < 8; ++i) az[i] = -0.7 + 0.2 * i;
  for (int i = 0; i < 4; ++i) el[i] = -0.3 + 0.2 * i;
  const Codebook book = build_codebook(g, az, el);
  REQUIRE(book.entries.size() == 32);
  for (int i = 0; i < 8; ++i) {
    for (int j = 0; j < 4; ++j) {
      CHECK(book.entries[i * 4 + j].direction.azimuth_theta == az[i]);
      CHECK(book.entries[i * 4 + j].direction.elevation_phi == el[j]);
    }
  }

  const std::vector<double> el0{-0.2, 0.0, 0.2};
  const Codebook with_zero = build_codebook(g, one, el0);
  CHECK(with_zero.entries[1].steering.isApprox(cvec::Ones(16), 0.0));
  CHECK_THROWS_AS(build_codebook(g, {}, one), ConfigError);
}

TEST_CASE("channel generation is deterministic and well-shaped") {
  const ChannelSet a = generate_channels(1, 4, 16, 1e-6);
  const ChannelSet b = generate_channels(1, 4, 16, 1e-6);
  REQUIRE(a.num_users() == 4);
  for (std::size_t k = 0; k < 4; ++k) {
    REQUIRE(a.users[k].size() == 16);
    CHECK(a.users[k].allFinite());
    CHECK((a.users[k].array() == b.users[k].array()).all());
  }
  const ChannelSet c = generate_channels(2, 4, 16, 1e-6);
  CHECK_FALSE((a.users[0].array() == c.users[0].array()).all());
  CHECK_THROWS_AS(generate_channels(1, 5, 4, 1e-6), ArgumentError);
}

TEST_CASE("channel entries have unit variance") {
  // 1563 draws of 4 x 16 entries, about 1e5 samples
  double sum = 0.0;
  std::size_t n = 0;
  for (std::uint64_t seed = 0; seed < 1563; ++seed) {
    for (const auto& h : generate_channels(seed, 4, 16, 1e-6).users) {
      for (Eigen::Index i = 0; i < h.size(); ++i) {
        sum += std::norm(h(i));
        ++n;
      }
    }
  }
  const double var = sum / static_cast<double>(n);
  CHECK(var > 0.97);
  CHECK(var < 1.03);
}

TEST_CASE("ZF with one user is matched filtering") {
  const ChannelSet ch = generate_channels(3, 1, 8, 1e-6);
  const Precoder p = zf_precoder(ch);
  CHECK((p.beams[0] - ch.users[0] / ch.users[0].norm()).norm() < 1e-12);
}

TEST_CASE("ZF with orthogonal users normalizes each channel") {
  ChannelSet ch;
  cvec h1 = cvec::Zero(4), h2 = cvec::Zero(4);
  h1 << std::complex<double>(1, 1), 2.0, 0.0, 0.0;
  h2 << 0.0, 0.0, std::complex<double>(0, 3), 1.0;
  ch.users = {h1, h2};
  const Precoder p = zf_precoder(ch);
  CHECK((p.beams[0] - h1 / h1.norm()).norm() < 1e-12);
  CHECK((p.beams[1] - h2 / h2.norm()).norm() < 1e-12);
}

TEST_CASE("ZF nulls interference on random channels") {
  for (std::uint64_t seed = 1; seed <= 50; ++seed) {
    const ChannelSet ch = generate_channels(seed, 4, 16, 1e-6);
    const Precoder p = zf_precoder(ch);
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(std::abs(p.beams[k].norm() - 1.0) < 1e-12);
      const double own = std::abs(ch.users[k].dot(p.beams[k]));
      for (std::size_t j = 0; j < 4; ++j) {
        if (j != k) CHECK(std::abs(ch.users[k].dot(p.beams[j])) <= 1e-9 * own);
      }
    }
  }
}

TEST_CASE("rank-deficient channels are rejected") {
  ChannelSet ch = generate_channels(1, 2, 4, 1e-6);
  ch.users[1] = ch.users[0] * std::complex<double>(0.0, 2.0);
  CHECK_THROWS_AS(zf_precoder(ch), SingularError);
}

TEST_CASE("communication SNR") {
  ChannelSet ch;
  cvec h(4);
  h << 1.0, 1.0, 1.0, 1.0;  // |h|^2 = 4
  ch.users = {h};
  ch.noise_power_sigma_n2 = 1e-6;
  const Precoder p = zf_precoder(ch);
  const std::vector<double> pw{1e-3};
  CHECK(comm_snr(ch, p, pw)[0] == doctest::Approx(4000.0).epsilon(1e-12));
  const std::vector<double> zero{0.0};
  CHECK(comm_snr(ch, p, zero)[0] == 0.0);

  const ChannelSet r = generate_channels(9, 4, 16, 1e-6);
  const Precoder rp = zf_precoder(r);
  const std::vector<double> p1{0.1, 0.2, 0.3, 0.4}, p2{0.2, 0.4, 0.6, 0.8};
  const auto s1 = comm_snr(r, rp, p1), s2 = comm_snr(r, rp, p2);
  for (int k = 0; k < 4; ++k) CHECK(std::abs(s2[k] - 2 * s1[k]) <= 1e-12 * s2[k]);
  const std::vector<double> neg{-1.0, 0, 0, 0};
  CHECK_THROWS_AS(comm_snr(r, rp, neg), ArgumentError);
}

TEST_CASE("minimum communication power closed form") {
  ChannelSet ch;
  cvec h = cvec::Zero(2);
  h(0) = 1.0;  // |h^H w|^2 = 1
  ch.users = {h};
  ch.noise_power_sigma_n2 = 1e-6;
  const auto sol = min_comm_power(ch, zf_precoder(ch), 5.0, 1.0);
  CHECK(sol.per_user_w[0] == doctest::Approx(5e-6).epsilon(1e-14));
  CHECK(min_comm_power(ch, zf_precoder(ch), 1e-30, 1.0).total_w < 1e-29);
}

TEST_CASE("minimum communication power is tight and matches bisection") {
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const ChannelSet ch = generate_channels(seed, 4, 16, 1e-6);
    const Precoder p = zf_precoder(ch);
    const auto sol = min_comm_power(ch, p, 5.0, 1.0);
    const auto snr = comm_snr(ch, p, sol.per_user_w);
    double total = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
      CHECK(snr[k] >= 5.0 - 1e-12);
      std::vector<double> less = sol.per_user_w;
      less[k] *= 1.0 - 1e-6;
      CHECK(comm_snr(ch, p, less)[k] < 5.0);
      const double ref = bisect_power(effective_gain(ch, p, k), 1e-6, 5.0);
      CHECK(std::abs(sol.per_user_w[k] - ref) <= 1e-9 * ref);
      total += sol.per_user_w[k];
    }
    CHECK(sol.total_w == doctest::Approx(total).epsilon(1e-15));
  }
}

TEST_CASE("minimum communication power above P_t is infeasible") {
  const ChannelSet ch = generate_channels(1, 4, 16, 1e-6);
  try {
    min_comm_power(ch, zf_precoder(ch), 1e12, 1.0);
    FAIL("expected InfeasibleError");
  } catch (const InfeasibleError& e) {
    CHECK(e.constraint() == "comm_snr");
  }
}

TEST_CASE("large-scale gain scales channel power") {
  const ChannelSet ch = generate_channels(1, 2, 4, 1e-6);
  const ChannelSet g = apply_large_scale_gain(ch, 0.25);
  CHECK((g.users[0] - 0.5 * ch.users[0]).norm() < 1e-15);
  CHECK_THROWS_AS(apply_large_scale_gain(ch, 0.0), ArgumentError);
}

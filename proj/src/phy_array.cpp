// SPDX-License-Identifier: Apache-2.0
#include "iscc/phy_array.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>
#include <string>

#include "iscc/errors.hpp"

namespace iscc {

void validate(const ArrayGeometry& geom) {
  if (geom.n_x < 1 || geom.n_z < 1) {
    throw ArgumentError("array geometry needs n_x >= 1 and n_z >= 1");
  }
  if (!(geom.spacing_over_wavelength > 0.0) || !std::isfinite(geom.spacing_over_wavelength)) {
    throw ArgumentError("array element spacing must be positive");
  }
}

cvec steering_vector(const ArrayGeometry& geom, const BeamDirection& dir) {
  validate(geom);
  const double k = 2.0 * std::numbers::pi * geom.spacing_over_wavelength;
  const double sin_phi = std::sin(dir.elevation_phi);
  const double horizontal = k * sin_phi * std::cos(dir.azimuth_theta);
  const double vertical = k * sin_phi;

  cvec a(geom.num_elements());
  for (int m = 0; m < geom.n_x; ++m) {
    for (int n = 0; n < geom.n_z; ++n) {
      a(m * geom.n_z + n) = std::polar(1.0, m * horizontal + n * vertical);
    }
  }
  return a;
}

Codebook build_codebook(const ArrayGeometry& geom, std::span<const double> azimuth_grid,
                        std::span<const double> elevation_grid) {
  if (azimuth_grid.empty() || elevation_grid.empty()) {
    throw ConfigError("beam codebook needs non-empty azimuth and elevation grids");
  }
  Codebook book;
  book.entries.reserve(azimuth_grid.size() * elevation_grid.size());
  for (double theta : azimuth_grid) {
    for (double phi : elevation_grid) {
      BeamDirection dir{theta, phi};
      book.entries.push_back({dir, steering_vector(geom, dir)});
    }
  }
  return book;
}

ChannelSet generate_channels(std::uint64_t seed, int num_users, int num_elements,
                             double sigma_n2) {
  if (num_users < 1) {
    throw ArgumentError("channel generation needs at least one user");
  }
  if (num_elements < num_users) {
    throw ArgumentError("zero-forcing needs N_t >= K (got N_t=" + std::to_string(num_elements) +
                        ", K=" + std::to_string(num_users) + ")");
  }
  if (!(sigma_n2 > 0.0)) {
    throw ArgumentError("noise power must be positive");
  }
  std::mt19937_64 rng(seed);
  // unit variance split evenly between real and imaginary parts
  std::normal_distribution<double> gauss(0.0, std::sqrt(0.5));

  ChannelSet set;
  set.noise_power_sigma_n2 = sigma_n2;
  set.users.reserve(num_users);
  for (int k = 0; k < num_users; ++k) {
    cvec h(num_elements);
    for (int i = 0; i < num_elements; ++i) {
      const double re = gauss(rng);
      const double im = gauss(rng);
      h(i) = {re, im};
    }
    set.users.push_back(std::move(h));
  }
  return set;
}

ChannelSet apply_large_scale_gain(ChannelSet channels, double power_gain) {
  if (!(power_gain > 0.0) || !std::isfinite(power_gain)) {
    throw ArgumentError("large-scale channel gain must be positive");
  }
  const double amplitude = std::sqrt(power_gain);
  for (auto& h : channels.users) h *= amplitude;
  return channels;
}

Precoder zf_precoder(const ChannelSet& channels) {
  const auto k_users = static_cast<Eigen::Index>(channels.num_users());
  if (k_users == 0) throw ArgumentError("zero-forcing needs at least one user");
  const auto n_t = channels.users.front().size();

  Eigen::MatrixXcd h(n_t, k_users);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    if (channels.users[k].size() != n_t) {
      throw ArgumentError("user channels have different lengths");
    }
    h.col(k) = channels.users[k];
  }
  if (n_t < k_users) {
    throw SingularError("zero-forcing needs N_t >= K");
  }

  Eigen::JacobiSVD<Eigen::MatrixXcd> svd(h);
  const auto& sv = svd.singularValues();
  if (!(sv(sv.size() - 1) >= 1e-10 * sv(0))) {
    std::ostringstream msg;
    msg << "channel matrix is rank deficient (singular value ratio " << sv(sv.size() - 1) / sv(0)
        << " < 1e-10)";
    throw SingularError(msg.str());
  }

  // W = H (H^H H)^{-1}, so that H^H W = I
  const Eigen::MatrixXcd gram = h.adjoint() * h;
  const Eigen::MatrixXcd w =
      h * gram.ldlt().solve(Eigen::MatrixXcd::Identity(k_users, k_users));

  Precoder p;
  p.beams.reserve(k_users);
  for (Eigen::Index k = 0; k < k_users; ++k) {
    p.beams.push_back(w.col(k) / w.col(k).norm());
  }
  return p;
}

double effective_gain(const ChannelSet& channels, const Precoder& precoder, std::size_t k) {
  return std::norm(channels.users.at(k).dot(precoder.beams.at(k)));
}

std::vector<double> comm_snr(const ChannelSet& channels, const Precoder& precoder,
                             std::span<const double> powers_w) {
  if (powers_w.size() != channels.num_users() || precoder.beams.size() != channels.num_users()) {
    throw ArgumentError("comm_snr: powers, beams and channels must have one entry per user");
  }
  std::vector<double> snr(powers_w.size());
  for (std::size_t k = 0; k < powers_w.size(); ++k) {
    if (powers_w[k] < 0.0) throw ArgumentError("comm_snr: negative transmit power");
    snr[k] = powers_w[k] * effective_gain(channels, precoder, k) / channels.noise_power_sigma_n2;
  }
  return snr;
}

CommPowerSolution min_comm_power(const ChannelSet& channels, const Precoder& precoder,
                                 double snr_min, double p_t_w) {
  if (!(snr_min > 0.0)) throw ArgumentError("min_comm_power: snr_min must be positive");
  if (precoder.beams.size() != channels.num_users()) {
    throw ArgumentError("min_comm_power: one beam per user required");
  }

  CommPowerSolution sol;
  sol.per_user_w.resize(channels.num_users());
  std::vector<std::size_t> over;
  for (std::size_t k = 0; k < channels.num_users(); ++k) {
    sol.per_user_w[k] =
        snr_min * channels.noise_power_sigma_n2 / effective_gain(channels, precoder, k);
    sol.total_w += sol.per_user_w[k];
    if (sol.per_user_w[k] > p_t_w) over.push_back(k);
  }

  if (!over.empty() || sol.total_w > p_t_w) {
    std::ostringstream msg;
    msg << "comm_snr: minimum communication power " << sol.total_w << " W exceeds P_t = " << p_t_w
        << " W";
    if (!over.empty()) {
      msg << " (users";
      for (auto k : over) msg << ' ' << k;
      msg << " individually exceed P_t)";
    }
    throw InfeasibleError("comm_snr", msg.str());
  }
  return sol;
}

}  // namespace iscc

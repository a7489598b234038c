// SPDX-License-Identifier: Apache-2.0
//
// Array geometry, beam codebooks, downlink channels and zero-forcing precoding.
#pragma once

#include <complex>
#include <cstdint>
#include <span>
#include <vector>

#include <Eigen/Dense>

namespace iscc {

using cvec = Eigen::VectorXcd;

/// Uniform planar array of n_x horizontal by n_z vertical elements.
struct ArrayGeometry {
  int n_x = 4;
  int n_z = 4;
  double spacing_over_wavelength = 0.5;  // d / lambda

  int num_elements() const { return n_x * n_z; }
};

/// Throws ArgumentError when the geometry violates its invariants.
void validate(const ArrayGeometry& geom);

/// Azimuth/elevation pair in radians.
struct BeamDirection {
  double azimuth_theta = 0.0;
  double elevation_phi = 0.0;
};

struct CodebookEntry {
  BeamDirection direction;
  cvec steering;
};

struct Codebook {
  std::vector<CodebookEntry> entries;
};

/// Downlink channels h_k (one per user) and receiver noise power.
struct ChannelSet {
  std::vector<cvec> users;
  double noise_power_sigma_n2 = 1e-6;

  std::size_t num_users() const { return users.size(); }
};

/// Unit-norm communication beams w_{c,k}, one per user.
struct Precoder {
  std::vector<cvec> beams;
};

struct CommPowerSolution {
  std::vector<double> per_user_w;
  double total_w = 0.0;
};

/// UPA response a_x(theta, phi) (x) a_z(theta, phi); element (m, n) sits at index m * n_z + n.
cvec steering_vector(const ArrayGeometry& geom, const BeamDirection& dir);

/// One entry per (azimuth, elevation) pair, azimuth-major.
Codebook build_codebook(const ArrayGeometry& geom, std::span<const double> azimuth_grid,
                        std::span<const double> elevation_grid);

/// i.i.d. CN(0, 1) entries; a pure function of its arguments.
ChannelSet generate_channels(std::uint64_t seed, int num_users, int num_elements,
                             double sigma_n2);

/// Applies a common large-scale power gain (path loss) to every user channel.
ChannelSet apply_large_scale_gain(ChannelSet channels, double power_gain);

/// Zero-forcing beams: normalized columns of H (H^H H)^{-1}.
Precoder zf_precoder(const ChannelSet& channels);

/// |h_k^H w_k|^2
double effective_gain(const ChannelSet& channels, const Precoder& precoder, std::size_t k);

std::vector<double> comm_snr(const ChannelSet& channels, const Precoder& precoder,
                             std::span<const double> powers_w);

/// Closed-form solution of the minimum total power problem under ZF, where the
/// per-user SNR constraints decouple.
CommPowerSolution min_comm_power(const ChannelSet& channels, const Precoder& precoder,
                                 double snr_min, double p_t_w);

}  // namespace iscc

// SPDX-License-Identifier: Apache-2.0
//
// Echo SNR, CRB range uncertainty and point-cloud synthesis.
#pragma once

#include <cstdint>
#include <random>
#include <span>
#include <vector>

#include "iscc/geometry.hpp"
#include "iscc/phy_array.hpp"

namespace iscc {

struct SensingParams {
  double rcs_zeta = 1.0;
  double noise_power_sigma_z2 = 1e-6;  // W
  double bandwidth_b_r = 0.5e9;        // Hz
  double speed_of_light_c = 3e8;       // m/s
};

void validate(const SensingParams& params);

struct SensingBeam {
  BeamDirection direction;
  double distance_d_p = 3.0;  // m
};

struct PointCloudFrame {
  std::vector<Vec3> points;
  std::vector<int> source_beam_index;
  int frame_index = 0;
};

using RngStream = std::mt19937_64;

/// Independent stream for item `index` of a run seeded with `seed`.
RngStream derive_stream(std::uint64_t seed, std::uint64_t index);

double echo_snr(double p_r_w, const SensingBeam& beam, const SensingParams& params);

/// SNR of a beam at range d_p given the SNR observed at range d_o.
double scale_snr_to_beam(double snr_o, double d_o, double d_p);

/// CRB on the range-estimate variance, m^2. Throws DomainError for snr <= 0.
double crb_range_variance(double snr, const SensingParams& params);

/// d_p plus a N(0, variance) draw.
double sample_range(const SensingBeam& beam, double variance, RngStream& rng);

/// range * [cos(theta)cos(phi), cos(theta)sin(phi), sin(theta)]
Vec3 to_point(double range, const BeamDirection& dir);

/// Sensing power at which the echo SNR equals gamma_min_det.
double min_detect_power(const SensingBeam& beam, const SensingParams& params,
                        double gamma_min_det);

/// Codebook directions as unit vectors (structure of arrays) for nearest-beam lookup.
class DirectionIndex {
 public:
  explicit DirectionIndex(const Codebook& codebook);

  /// Entry whose direction has the largest cosine with `unit`; lowest index on ties.
  std::size_t nearest(const Vec3& unit) const;

  const BeamDirection& direction(std::size_t i) const { return directions_[i]; }
  std::size_t size() const { return directions_.size(); }

 private:
  std::vector<BeamDirection> directions_;
  std::vector<double> ux_, uy_, uz_;
};

struct SynthesisOptions {
  Vec3 ap_position{0.0, 0.0, 0.0};
  double min_range_m = 0.01;  // floor applied to sampled ranges
  int frame_index = 0;
};

/// One jittered point per joint, in AP-centered coordinates.
PointCloudFrame synthesize_frame(std::span<const Vec3> joints, const DirectionIndex& beams,
                                 double p_r_w, const SensingParams& params,
                                 const SynthesisOptions& options, RngStream& rng);

PointCloudFrame synthesize_frame(std::span<const Vec3> joints, const Codebook& codebook,
                                 double p_r_w, const SensingParams& params,
                                 const SynthesisOptions& options, RngStream& rng);

}  // namespace iscc

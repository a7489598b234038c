// SPDX-License-Identifier: Apache-2.0
#include "iscc/sensing_model.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "iscc/errors.hpp"
#include "iscc/kernels.hpp"

namespace iscc {

void validate(const SensingParams& p) {
  auto positive = [](double v) { return v > 0.0 && std::isfinite(v); };
  if (!positive(p.rcs_zeta) || !positive(p.noise_power_sigma_z2) || !positive(p.bandwidth_b_r) ||
      !positive(p.speed_of_light_c)) {
    throw ArgumentError("sensing parameters must all be positive and finite");
  }
}

RngStream derive_stream(std::uint64_t seed, std::uint64_t index) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(index), static_cast<std::uint32_t>(index >> 32)};
  return RngStream(seq);
}

double echo_snr(double p_r_w, const SensingBeam& beam, const SensingParams& params) {
  if (p_r_w < 0.0) throw ArgumentError("echo_snr: negative sensing power");
  const double d2 = beam.distance_d_p * beam.distance_d_p;
  return params.rcs_zeta * params.rcs_zeta * p_r_w /
         (4.0 * d2 * d2 * params.noise_power_sigma_z2);
}

double scale_snr_to_beam(double snr_o, double d_o, double d_p) {
  if (!(d_o > 0.0) || !(d_p > 0.0)) {
    throw ArgumentError("scale_snr_to_beam: distances must be positive");
  }
  const double r = d_o / d_p;
  return snr_o * (r * r) * (r * r);
}

double crb_range_variance(double snr, const SensingParams& params) {
  if (!(snr > 0.0)) {
    throw DomainError("crb_range_variance: SNR must be positive (target undetectable), got " +
                      std::to_string(snr));
  }
  const double c = params.speed_of_light_c;
  const double b = params.bandwidth_b_r;
  return c * c / (8.0 * std::numbers::pi * std::numbers::pi * snr * b * b);
}

double sample_range(const SensingBeam& beam, double variance, RngStream& rng) {
  if (variance < 0.0) throw ArgumentError("sample_range: negative variance");
  if (variance == 0.0) return beam.distance_d_p;
  std::normal_distribution<double> jitter(0.0, std::sqrt(variance));
  return beam.distance_d_p + jitter(rng);
}

Vec3 to_point(double range, const BeamDirection& dir) {
  const double ct = std::cos(dir.azimuth_theta);
  return {range * ct * std::cos(dir.elevation_phi), range * ct * std::sin(dir.elevation_phi),
          range * std::sin(dir.azimuth_theta)};
}

double min_detect_power(const SensingBeam& beam, const SensingParams& params,
                        double gamma_min_det) {
  const double d2 = beam.distance_d_p * beam.distance_d_p;
  return 4.0 * d2 * d2 * params.noise_power_sigma_z2 * gamma_min_det /
         (params.rcs_zeta * params.rcs_zeta);
}

DirectionIndex::DirectionIndex(const Codebook& codebook) {
  if (codebook.entries.empty()) throw ArgumentError("empty beam codebook");
  const auto n = codebook.entries.size();
  directions_.reserve(n);
  ux_.reserve(n);
  uy_.reserve(n);
  uz_.reserve(n);
  for (const auto& e : codebook.entries) {
    const Vec3 u = to_point(1.0, e.direction);
    directions_.push_back(e.direction);
    ux_.push_back(u[0]);
    uy_.push_back(u[1]);
    uz_.push_back(u[2]);
  }
}

std::size_t DirectionIndex::nearest(const Vec3& unit) const {
  return kernels::active().argmax_dot({ux_, uy_, uz_}, unit);
}

PointCloudFrame synthesize_frame(std::span<const Vec3> joints, const DirectionIndex& beams,
                                 double p_r_w, const SensingParams& params,
                                 const SynthesisOptions& options, RngStream& rng) {
  if (joints.empty()) throw ArgumentError("synthesize_frame: no joints");
  validate(params);

  PointCloudFrame frame;
  frame.frame_index = options.frame_index;
  frame.points.reserve(joints.size());
  frame.source_beam_index.reserve(joints.size());

  for (std::size_t j = 0; j < joints.size(); ++j) {
    const Vec3 ray = joints[j] - options.ap_position;
    const double range = norm(ray);
    if (!(range > 0.0)) {
      throw DegenerateGeometryError("joint " + std::to_string(j) +
                                    " coincides with the access point");
    }
    const std::size_t b = beams.nearest((1.0 / range) * ray);
    const SensingBeam beam{beams.direction(b), range};
    const double snr = echo_snr(p_r_w, beam, params);
    // zero power leaves the range unobservable; there is no finite CRB to sample
    const double variance = crb_range_variance(snr, params);
    const double measured = std::max(sample_range(beam, variance, rng), options.min_range_m);

    frame.points.push_back(to_point(measured, beam.direction));
    frame.source_beam_index.push_back(static_cast<int>(b));
  }
  return frame;
}

PointCloudFrame synthesize_frame(std::span<const Vec3> joints, const Codebook& codebook,
                                 double p_r_w, const SensingParams& params,
                                 const SynthesisOptions& options, RngStream& rng) {
  return synthesize_frame(joints, DirectionIndex(codebook), p_r_w, params, options, rng);
}

}  // namespace iscc

// SPDX-License-Identifier: Apache-2.0
//
// Point-cloud preprocessing, reference state-space recurrence, pose metrics and
// the calibrated prediction-error surrogate m(p_r, L).
#pragma once

#include <cstddef>
#include <span>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "iscc/geometry.hpp"
#include "iscc/sensing_model.hpp"

namespace iscc {

struct SkeletonFrame {
  std::vector<Vec3> joints;
};

/// T_w consecutive observed frames and the skeleton of the frame that follows.
struct Clip {
  std::vector<PointCloudFrame> frames;
  SkeletonFrame target;
};

/// Discrete linear state-space model h_b = A h_{b-1} + B x_b, y_b = C h_b + D x_b.
struct SSMParams {
  Eigen::MatrixXd a_bar;  // N x N
  Eigen::MatrixXd b_bar;  // N x d
  Eigen::MatrixXd c_bar;  // d x N
  Eigen::MatrixXd d_mat;  // d x d
};

/// Greedy max-min farthest point sampling; ties go to the lowest index.
std::vector<std::size_t> fps(std::span<const Vec3> points, std::size_t n_centers,
                             std::size_t start_index = 0);

/// k nearest points per center: the center first, then by (distance, index).
std::vector<std::vector<std::size_t>> knn_group(std::span<const Vec3> points,
                                                std::span<const std::size_t> centers,
                                                std::size_t k);

std::vector<Vec3> normalize_group(std::span<const Vec3> points,
                                  std::span<const std::size_t> group,
                                  std::size_t center_index);

/// Groups concatenated in order, each point as (x, y, z).
std::vector<double> serialize_frame(std::span<const std::vector<Vec3>> groups);

/// Lexicographically smallest point; independent of storage order.
std::size_t canonical_start_index(std::span<const Vec3> points);

/// FPS -> KNN -> center normalization -> serialization, starting FPS at
/// canonical_start_index so the output does not depend on storage order.
std::vector<double> preprocess_frame(std::span<const Vec3> points, std::size_t n_centers,
                                     std::size_t k);

std::vector<Eigen::VectorXd> ssm_forward(const SSMParams& params,
                                         std::span<const Eigen::VectorXd> inputs,
                                         const Eigen::VectorXd& h0);

/// Half-open [start, end) windows, each leaving one frame after it as the target.
std::vector<std::pair<std::size_t, std::size_t>> sliding_windows(std::size_t trace_length,
                                                                 std::size_t t_w,
                                                                 std::size_t stride);

/// Clips over a synthesized trace and its ground-truth skeletons.
std::vector<Clip> make_clips(std::span<const PointCloudFrame> frames,
                             std::span<const SkeletonFrame> truth, std::size_t t_w,
                             std::size_t stride);

/// Mean per-joint position error in centimeters (inputs in meters).
double mpjpe(std::span<const SkeletonFrame> pred, std::span<const SkeletonFrame> truth);

/// Mean squared joint error over a batch, m^2.
double mse_loss(std::span<const SkeletonFrame> pred, std::span<const SkeletonFrame> truth);

/// m(p_r, L) = floor_a + floor_b * rho^L + kappa * sigma_d(p_r) [cm], where sigma_d
/// is the CRB range deviation of a target at the reference distance.
struct SurrogateModel {
  double floor_a = 4.196621873529039;
  double floor_b = 6.256811518440883;
  double floor_rho = 0.5621952165213433;
  double jitter_kappa = 0.047955327627869214;
  double reference_distance_d_o = 3.0;
  SensingParams sensing_params{};
  int l_max = 6;

  /// sigma_d at p_r = 1 W, in cm. sigma_d(p_r) = jitter_cm_at_unit_power() / sqrt(p_r).
  double jitter_cm_at_unit_power() const;
  double depth_floor(int depth) const;
};

void validate(const SurrogateModel& model);

double surrogate_mpjpe(const SurrogateModel& model, double p_r_w, int depth);

/// Surrogate over many powers at one depth (runtime-selected kernel).
void surrogate_mpjpe_batch(const SurrogateModel& model, int depth, std::span<const double> p_r_w,
                           std::span<double> out);

struct CalibrationTarget {
  double p_r_w;
  int depth;
  double mpjpe_cm;
};

struct CalibrationResult {
  SurrogateModel model;
  std::vector<double> residuals_cm;  // fitted minus target
};

/// Constrained least-squares fit of (floor_a, floor_b, floor_rho, jitter_kappa).
/// Sensing parameters, reference distance and l_max are taken from `base`.
CalibrationResult calibrate_surrogate(std::span<const CalibrationTarget> targets,
                                      const SurrogateModel& base = {});

}  // namespace iscc

// SPDX-License-Identifier: Apache-2.0
#include "iscc/pose_pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <set>
#include <string>

#include "iscc/errors.hpp"
#include "iscc/kernels.hpp"

namespace iscc {
namespace {

struct Columns {
  std::vector<double> x, y, z;

  explicit Columns(std::span<const Vec3> pts) {
    x.reserve(pts.size());
    y.reserve(pts.size());
    z.reserve(pts.size());
    for (const auto& p : pts) {
      x.push_back(p[0]);
      y.push_back(p[1]);
      z.push_back(p[2]);
    }
  }

  kernels::PointColumns view() const { return {x, y, z}; }
};

void check_same_shape(std::span<const SkeletonFrame> pred, std::span<const SkeletonFrame> truth,
                      const char* what) {
  if (pred.empty() || pred.size() != truth.size()) {
    throw ArgumentError(std::string(what) + ": prediction and ground truth differ in length");
  }
  const auto j = truth.front().joints.size();
  for (std::size_t i = 0; i < pred.size(); ++i) {
    if (j == 0 || pred[i].joints.size() != j || truth[i].joints.size() != j) {
      throw ArgumentError(std::string(what) + ": joint count mismatch at frame " +
                          std::to_string(i));
    }
  }
}

}  // namespace

std::vector<std::size_t> fps(std::span<const Vec3> points, std::size_t n_centers,
                             std::size_t start_index) {
  if (n_centers < 1 || n_centers > points.size()) {
    throw ArgumentError("fps: n_centers must be in [1, " + std::to_string(points.size()) + "]");
  }
  if (start_index >= points.size()) throw ArgumentError("fps: start_index out of range");

  const Columns cols(points);
  const auto& k = kernels::active();
  std::vector<double> min_d(points.size(), std::numeric_limits<double>::infinity());

  std::vector<std::size_t> order{start_index};
  order.reserve(n_centers);
  min_d[start_index] = -1.0;
  while (order.size() < n_centers) {
    const std::size_t next = k.fps_update(cols.view(), points[order.back()], min_d);
    min_d[next] = -1.0;
    order.push_back(next);
  }
  return order;
}

std::vector<std::vector<std::size_t>> knn_group(std::span<const Vec3> points,
                                                std::span<const std::size_t> centers,
                                                std::size_t k) {
  if (k < 1 || k > points.size()) {
    throw ArgumentError("knn_group: k must be in [1, " + std::to_string(points.size()) + "]");
  }
  const Columns cols(points);
  const auto& kern = kernels::active();
  std::vector<double> d(points.size());
  std::vector<std::size_t> idx(points.size());

  std::vector<std::vector<std::size_t>> groups;
  groups.reserve(centers.size());
  for (std::size_t c : centers) {
    if (c >= points.size()) throw ArgumentError("knn_group: center index out of range");
    kern.squared_distances(cols.view(), points[c], d);

    idx.clear();
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (i != c) idx.push_back(i);
    }
    auto closer = [&](std::size_t a, std::size_t b) {
      return d[a] < d[b] || (d[a] == d[b] && a < b);
    };
    std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1), idx.end(),
                      closer);

    std::vector<std::size_t> g{c};
    g.insert(g.end(), idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(k - 1));
    groups.push_back(std::move(g));
  }
  return groups;
}

std::vector<Vec3> normalize_group(std::span<const Vec3> points,
                                  std::span<const std::size_t> group, std::size_t center_index) {
  if (std::find(group.begin(), group.end(), center_index) == group.end()) {
    throw ArgumentError("normalize_group: center is not a member of the group");
  }
  std::vector<Vec3> rel;
  rel.reserve(group.size());
  for (std::size_t i : group) rel.push_back(points[i] - points[center_index]);
  return rel;
}

std::vector<double> serialize_frame(std::span<const std::vector<Vec3>> groups) {
  if (groups.empty()) throw ArgumentError("serialize_frame: no groups");
  std::vector<double> seq;
  for (const auto& g : groups) {
    for (const auto& p : g) seq.insert(seq.end(), p.begin(), p.end());
  }
  return seq;
}

std::size_t canonical_start_index(std::span<const Vec3> points) {
  if (points.empty()) throw ArgumentError("canonical_start_index: empty point set");
  return static_cast<std::size_t>(
      std::min_element(points.begin(), points.end()) - points.begin());
}

std::vector<double> preprocess_frame(std::span<const Vec3> points, std::size_t n_centers,
                                     std::size_t k) {
  const auto centers = fps(points, n_centers, canonical_start_index(points));
  const auto groups = knn_group(points, centers, k);
  std::vector<std::vector<Vec3>> rel;
  rel.reserve(groups.size());
  for (std::size_t i = 0; i < groups.size(); ++i) {
    rel.push_back(normalize_group(points, groups[i], centers[i]));
  }
  return serialize_frame(rel);
}

std::vector<Eigen::VectorXd> ssm_forward(const SSMParams& p,
                                         std::span<const Eigen::VectorXd> inputs,
                                         const Eigen::VectorXd& h0) {
  const auto n = p.a_bar.rows();
  const auto d = p.d_mat.rows();
  if (p.a_bar.cols() != n || p.b_bar.rows() != n || p.b_bar.cols() != d || p.c_bar.rows() != d ||
      p.c_bar.cols() != n || p.d_mat.cols() != d || h0.size() != n) {
    throw ArgumentError("ssm_forward: inconsistent state-space dimensions");
  }

  std::vector<Eigen::VectorXd> out;
  out.reserve(inputs.size());
  Eigen::VectorXd h = h0;
  for (std::size_t b = 0; b < inputs.size(); ++b) {
    if (inputs[b].size() != d) {
      throw ArgumentError("ssm_forward: input " + std::to_string(b) + " has wrong dimension");
    }
    h = p.a_bar * h + p.b_bar * inputs[b];
    out.push_back(p.c_bar * h + p.d_mat * inputs[b]);
  }
  return out;
}

std::vector<std::pair<std::size_t, std::size_t>> sliding_windows(std::size_t trace_length,
                                                                 std::size_t t_w,
                                                                 std::size_t stride) {
  if (t_w < 1 || t_w > trace_length) {
    throw ArgumentError("sliding_windows: window length must be in [1, trace length]");
  }
  if (stride < 1) throw ArgumentError("sliding_windows: stride must be >= 1");
  std::vector<std::pair<std::size_t, std::size_t>> w;
  for (std::size_t s = 0; s + t_w + 1 <= trace_length; s += stride) w.emplace_back(s, s + t_w);
  return w;
}

std::vector<Clip> make_clips(std::span<const PointCloudFrame> frames,
                             std::span<const SkeletonFrame> truth, std::size_t t_w,
                             std::size_t stride) {
  if (frames.size() != truth.size()) {
    throw ArgumentError("make_clips: point-cloud and skeleton traces differ in length");
  }
  std::vector<Clip> clips;
  for (auto [s, e] : sliding_windows(frames.size(), t_w, stride)) {
    Clip c;
    c.frames.assign(frames.begin() + static_cast<std::ptrdiff_t>(s),
                    frames.begin() + static_cast<std::ptrdiff_t>(e));
    c.target = truth[e];
    clips.push_back(std::move(c));
  }
  return clips;
}

double mpjpe(std::span<const SkeletonFrame> pred, std::span<const SkeletonFrame> truth) {
  check_same_shape(pred, truth, "mpjpe");
  double sum = 0.0;
  std::size_t count = 0;
  for (std::size_t f = 0; f < pred.size(); ++f) {
    for (std::size_t j = 0; j < pred[f].joints.size(); ++j) {
      // centimeters before the norm
      const Vec3 e = 100.0 * (pred[f].joints[j] - truth[f].joints[j]);
      sum += norm(e);
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

double mse_loss(std::span<const SkeletonFrame> pred, std::span<const SkeletonFrame> truth) {
  check_same_shape(pred, truth, "mse_loss");
  double sum = 0.0;
  for (std::size_t f = 0; f < pred.size(); ++f) {
    for (std::size_t j = 0; j < pred[f].joints.size(); ++j) {
      sum += squared_norm(pred[f].joints[j] - truth[f].joints[j]);
    }
  }
  return sum / static_cast<double>(pred.size() * truth.front().joints.size());
}

// ---------------------------------------------------------------------------
// Surrogate

double SurrogateModel::jitter_cm_at_unit_power() const {
  const SensingBeam beam{{}, reference_distance_d_o};
  return 100.0 * std::sqrt(crb_range_variance(echo_snr(1.0, beam, sensing_params), sensing_params));
}

double SurrogateModel::depth_floor(int depth) const {
  return floor_a + floor_b * std::pow(floor_rho, depth);
}

void validate(const SurrogateModel& m) {
  if (!(m.floor_a > 0.0)) throw ArgumentError("surrogate floor_a must be > 0");
  if (!(m.floor_b >= 0.0)) throw ArgumentError("surrogate floor_b must be >= 0");
  if (!(m.floor_rho > 0.0 && m.floor_rho < 1.0)) {
    throw ArgumentError("surrogate floor_rho must lie in (0, 1)");
  }
  if (!(m.jitter_kappa >= 0.0)) throw ArgumentError("surrogate jitter_kappa must be >= 0");
  if (!(m.reference_distance_d_o > 0.0)) {
    throw ArgumentError("surrogate reference distance must be > 0");
  }
  if (m.l_max < 1) throw ArgumentError("surrogate l_max must be >= 1");
  validate(m.sensing_params);
}

double surrogate_mpjpe(const SurrogateModel& model, double p_r_w, int depth) {
  if (!(p_r_w > 0.0)) throw ArgumentError("surrogate_mpjpe: p_r must be positive");
  if (depth < 1 || depth > model.l_max) {
    throw ArgumentError("surrogate_mpjpe: depth " + std::to_string(depth) + " outside [1, " +
                        std::to_string(model.l_max) + "]");
  }
  // same expression as the batch kernels
  return model.depth_floor(depth) +
         model.jitter_kappa * (model.jitter_cm_at_unit_power() / std::sqrt(p_r_w));
}

void surrogate_mpjpe_batch(const SurrogateModel& model, int depth, std::span<const double> p_r_w,
                           std::span<double> out) {
  if (out.size() != p_r_w.size()) throw ArgumentError("surrogate_mpjpe_batch: size mismatch");
  if (depth < 1 || depth > model.l_max) throw ArgumentError("surrogate_mpjpe_batch: bad depth");
  for (double p : p_r_w) {
    if (!(p > 0.0)) throw ArgumentError("surrogate_mpjpe_batch: p_r must be positive");
  }
  kernels::active().surrogate_batch(model.depth_floor(depth), model.jitter_kappa,
                                    model.jitter_cm_at_unit_power(), p_r_w, out);
}

// ---------------------------------------------------------------------------
// Calibration
//
// Variable projection: for fixed rho the model is linear in (a, b, kappa), so
// the profile SSE(rho) is scanned on a grid, refined by golden section, and the
// four parameters are then polished jointly with Gauss-Newton.

namespace {

struct LinearFit {
  double a = 0.0, b = 0.0, kappa = 0.0, sse = std::numeric_limits<double>::infinity();
};

struct FitData {
  std::vector<double> jitter;  // sigma_d(p_i) in cm
  std::vector<int> depth;
  std::vector<double> y;
};

double sse_of(const FitData& d, double a, double b, double rho, double kappa) {
  double s = 0.0;
  for (std::size_t i = 0; i < d.y.size(); ++i) {
    const double r = a + b * std::pow(rho, d.depth[i]) + kappa * d.jitter[i] - d.y[i];
    s += r * r;
  }
  return s;
}

// Least squares in (a, b, kappa) with b >= 0 and kappa >= 0, by active-set enumeration.
LinearFit fit_linear(const FitData& d, double rho) {
  const auto n = static_cast<Eigen::Index>(d.y.size());
  LinearFit best;
  for (int mask = 0; mask < 4; ++mask) {
    const bool use_b = !(mask & 1);
    const bool use_k = !(mask & 2);
    const Eigen::Index cols = 1 + use_b + use_k;
    Eigen::MatrixXd x(n, cols);
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i) {
      Eigen::Index c = 0;
      x(i, c++) = 1.0;
      if (use_b) x(i, c++) = std::pow(rho, d.depth[i]);
      if (use_k) x(i, c++) = d.jitter[i];
      y(i) = d.y[i];
    }
    const Eigen::VectorXd beta = x.colPivHouseholderQr().solve(y);
    LinearFit f;
    Eigen::Index c = 0;
    f.a = beta(c++);
    f.b = use_b ? beta(c++) : 0.0;
    f.kappa = use_k ? beta(c++) : 0.0;
    if (f.b < 0.0 || f.kappa < 0.0) continue;
    f.sse = sse_of(d, f.a, f.b, rho, f.kappa);
    if (f.sse < best.sse) best = f;
  }
  return best;
}

}  // namespace

CalibrationResult calibrate_surrogate(std::span<const CalibrationTarget> targets,
                                      const SurrogateModel& base) {
  if (targets.size() < 4) {
    throw CalibrationError("calibration needs at least 4 targets, got " +
                           std::to_string(targets.size()));
  }
  std::set<int> depths;
  std::set<double> powers;
  for (const auto& t : targets) {
    if (!(t.p_r_w > 0.0) || !std::isfinite(t.p_r_w) || !std::isfinite(t.mpjpe_cm)) {
      throw CalibrationError("calibration target with non-positive power or non-finite error");
    }
    if (t.depth < 1 || t.depth > base.l_max) {
      throw CalibrationError("calibration target depth " + std::to_string(t.depth) +
                             " outside [1, " + std::to_string(base.l_max) + "]");
    }
    depths.insert(t.depth);
    powers.insert(t.p_r_w);
  }
  if (depths.size() < 2 || powers.size() < 2) {
    throw CalibrationError("calibration targets must span at least 2 depths and 2 powers");
  }

  FitData data;
  const double j1 = base.jitter_cm_at_unit_power();
  for (const auto& t : targets) {
    data.jitter.push_back(j1 / std::sqrt(t.p_r_w));
    data.depth.push_back(t.depth);
    data.y.push_back(t.mpjpe_cm);
  }

  constexpr int kGrid = 1000;
  int best_i = 1;
  double best_sse = std::numeric_limits<double>::infinity();
  for (int i = 1; i < kGrid; ++i) {
    const double s = fit_linear(data, static_cast<double>(i) / kGrid).sse;
    if (s < best_sse) {
      best_sse = s;
      best_i = i;
    }
  }

  // golden section on the bracketing grid cells
  double lo = static_cast<double>(best_i - 1) / kGrid;
  double hi = static_cast<double>(best_i + 1) / kGrid;
  lo = std::max(lo, 1e-9);
  hi = std::min(hi, 1.0 - 1e-9);
  const double g = (std::sqrt(5.0) - 1.0) / 2.0;
  double x1 = hi - g * (hi - lo), x2 = lo + g * (hi - lo);
  double f1 = fit_linear(data, x1).sse, f2 = fit_linear(data, x2).sse;
  for (int it = 0; it < 200 && hi - lo > 1e-15; ++it) {
    if (f1 <= f2) {
      hi = x2;
      x2 = x1;
      f2 = f1;
      x1 = hi - g * (hi - lo);
      f1 = fit_linear(data, x1).sse;
    } else {
      lo = x1;
      x1 = x2;
      f1 = f2;
      x2 = lo + g * (hi - lo);
      f2 = fit_linear(data, x2).sse;
    }
  }
  double rho = 0.5 * (lo + hi);
  LinearFit lin = fit_linear(data, rho);
  double a = lin.a, b = lin.b, kappa = lin.kappa;

  // Gauss-Newton polish; parameters pinned at a bound stay pinned
  const bool free_k = kappa > 0.0;
  if (b > 0.0) {
    double sse = sse_of(data, a, b, rho, kappa);
    const auto n = static_cast<Eigen::Index>(data.y.size());
    for (int it = 0; it < 50; ++it) {
      const Eigen::Index cols = free_k ? 4 : 3;
      Eigen::MatrixXd jac(n, cols);
      Eigen::VectorXd r(n);
      for (Eigen::Index i = 0; i < n; ++i) {
        const double pl = std::pow(rho, data.depth[i]);
        r(i) = a + b * pl + kappa * data.jitter[i] - data.y[i];
        jac(i, 0) = 1.0;
        jac(i, 1) = pl;
        jac(i, 2) = b * data.depth[i] * std::pow(rho, data.depth[i] - 1);
        if (free_k) jac(i, 3) = data.jitter[i];
      }
      const Eigen::VectorXd step = jac.colPivHouseholderQr().solve(-r);
      double t = 1.0;
      bool improved = false;
      for (int h = 0; h < 30; ++h, t *= 0.5) {
        const double na = a + t * step(0), nb = b + t * step(1), nr = rho + t * step(2);
        const double nk = free_k ? kappa + t * step(3) : kappa;
        if (!(nb > 0.0 && nr > 0.0 && nr < 1.0 && nk >= 0.0)) continue;
        const double ns = sse_of(data, na, nb, nr, nk);
        if (ns < sse) {
          a = na, b = nb, rho = nr, kappa = nk, sse = ns;
          improved = true;
          break;
        }
      }
      if (!improved || step.norm() < 1e-15) break;
    }
  }

  if (!(a > 0.0)) {
    throw CalibrationError("calibration produced a non-positive error floor (floor_a = " +
                           std::to_string(a) + ")");
  }

  CalibrationResult res;
  res.model = base;
  res.model.floor_a = a;
  res.model.floor_b = b;
  res.model.floor_rho = rho;
  res.model.jitter_kappa = kappa;
  for (const auto& t : targets) {
    res.residuals_cm.push_back(surrogate_mpjpe(res.model, t.p_r_w, t.depth) - t.mpjpe_cm);
  }
  return res;
}

}  // namespace iscc

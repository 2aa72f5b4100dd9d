#include "vgan/lip.hpp"

#include <cmath>

#include "vgan/errors.hpp"
#include "vgan/util.hpp"

namespace vgan::lip {

const std::array<std::string, kLipDim>& lip_slot_names() {
  static const std::array<std::string, kLipDim> names = {
      "min_inner_lip_dist", "max_inner_lip_dist", "min_lip_width", "max_lip_width",
      "left_angle_std", "right_angle_std", "inner_dist_std",
      "left_angle_velocity", "right_angle_velocity", "inner_dist_velocity"};
  return names;
}

namespace {

double corner_angle(double cx, double cy, double ux, double uy, double lx, double ly) {
  const double ax = ux - cx, ay = uy - cy;
  const double bx = lx - cx, by = ly - cy;
  const double na = std::hypot(ax, ay);
  const double nb = std::hypot(bx, by);
  if (na <= 0.0 || nb <= 0.0)
    fail(Errc::degenerate, "lip angle: zero-length vector at a corner");
  const double c = std::clamp((ax * bx + ay * by) / (na * nb), -1.0, 1.0);
  return std::acos(c);
}

}  // namespace

LipGeometry lip_geometry(const io::LandmarkFrame& frame,
                         const io::LandmarkIndexMap& map) {
  map.validate(static_cast<int>(frame.xs.size()));
  LipGeometry g;

  double acc = 0.0;
  for (std::size_t k = 0; k < map.inner_upper.size(); ++k) {
    const int iu = map.inner_upper[k];
    const int il = map.inner_lower[k];
    acc += std::hypot(frame.xs[iu] - frame.xs[il], frame.ys[iu] - frame.ys[il]);
  }
  g.inner_dist = acc / static_cast<double>(map.inner_upper.size());

  g.width = std::hypot(frame.xs[map.left_corner] - frame.xs[map.right_corner],
                       frame.ys[map.left_corner] - frame.ys[map.right_corner]);

  g.left_angle = corner_angle(frame.xs[map.left_corner], frame.ys[map.left_corner],
                              frame.xs[map.upper_mid], frame.ys[map.upper_mid],
                              frame.xs[map.lower_mid], frame.ys[map.lower_mid]);
  g.right_angle = corner_angle(frame.xs[map.right_corner], frame.ys[map.right_corner],
                               frame.xs[map.upper_mid], frame.ys[map.upper_mid],
                               frame.xs[map.lower_mid], frame.ys[map.lower_mid]);
  return g;
}

namespace {

double mean_abs_delta(const std::vector<double>& v) {
  double acc = 0.0;
  for (std::size_t i = 0; i + 1 < v.size(); ++i) acc += std::abs(v[i + 1] - v[i]);
  return acc / static_cast<double>(v.size() - 1);
}

}  // namespace

LipVector lip_feature_vector(const io::LandmarkSequence& seq, double start,
                             double end) {
  std::vector<double> inner, width, left, right;
  for (const auto& frame : seq.frames) {
    if (frame.t < start || frame.t > end) continue;
    const auto g = lip_geometry(frame, seq.index_map);
    inner.push_back(g.inner_dist);
    width.push_back(g.width);
    left.push_back(g.left_angle);
    right.push_back(g.right_angle);
  }
  if (inner.size() < 3)
    fail(Errc::insufficient_data,
         "lip features: fewer than 3 frames in [" + format_double(start) + "," +
             format_double(end) + "]");

  LipVector v;
  v[kMinInnerDist] = *std::min_element(inner.begin(), inner.end());
  v[kMaxInnerDist] = *std::max_element(inner.begin(), inner.end());
  v[kMinWidth] = *std::min_element(width.begin(), width.end());
  v[kMaxWidth] = *std::max_element(width.begin(), width.end());
  v[kLeftAngleStd] = stddev(left);
  v[kRightAngleStd] = stddev(right);
  v[kInnerDistStd] = stddev(inner);
  v[kLeftAngleVelocity] = mean_abs_delta(left) * seq.fps;
  v[kRightAngleVelocity] = mean_abs_delta(right) * seq.fps;
  v[kInnerDistVelocity] = mean_abs_delta(inner) * seq.fps;
  return v;
}

}  // namespace vgan::lip

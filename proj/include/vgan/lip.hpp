#pragma once

#include <array>
#include <string>

#include "vgan/io.hpp"

namespace vgan::lip {

inline constexpr int kLipDim = 10;

enum LipSlot : int {
  kMinInnerDist = 0, kMaxInnerDist, kMinWidth, kMaxWidth,
  kLeftAngleStd, kRightAngleStd, kInnerDistStd,
  kLeftAngleVelocity, kRightAngleVelocity, kInnerDistVelocity,
};

const std::array<std::string, kLipDim>& lip_slot_names();

struct LipVector {
  std::array<double, kLipDim> values{};
  double operator[](int i) const { return values[i]; }
  double& operator[](int i) { return values[i]; }
};

struct LipGeometry {
  double inner_dist = 0.0;   // mean distance over inner point pairs
  double width = 0.0;        // corner-to-corner distance
  double left_angle = 0.0;   // radians in [0, pi]
  double right_angle = 0.0;
};

LipGeometry lip_geometry(const io::LandmarkFrame& frame,
                         const io::LandmarkIndexMap& map);

// Amplitude (min/max of inner distance and width), stability (std over
// frames) and speed (mean |delta| per frame * fps) over [start,end].
LipVector lip_feature_vector(const io::LandmarkSequence& seq, double start,
                             double end);

}  // namespace vgan::lip

#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tbresnet/model.hpp"

namespace tbresnet {

/// One observation in raw units; attributes not being varied are held here.
struct ReferenceObservation {
  Eigen::VectorXd x;
  Eigen::VectorXd z;
};

/// Column-wise median of the data (mean of the two middle values for even N).
ReferenceObservation median_reference(const ChoiceDataset& data);

struct AxisSpec {
  std::string attribute;  // x or z column name
  double lo = 0.0;
  double hi = 1.0;
  int resolution = 50;

  /// Evenly spaced points from lo to hi inclusive.
  std::vector<double> points() const;
};

struct SlicePoint {
  double value = 0.0;
  double utility = 0.0;
};

/// Combined utility of alternative k as one raw attribute varies.
std::vector<SlicePoint> utility_slice(const TbResNetModel& model, int k, const AxisSpec& axis,
                                      const ReferenceObservation& reference);

struct SurfaceGrid {
  int alternative = 0;
  AxisSpec a;
  AxisSpec b;
  ReferenceObservation reference;
  std::vector<double> a_values;
  std::vector<double> b_values;
  Eigen::MatrixXd utilities;  // a.resolution x b.resolution
};

SurfaceGrid utility_grid(const TbResNetModel& model, int k, const AxisSpec& a, const AxisSpec& b,
                         const ReferenceObservation& reference);

}  // namespace tbresnet

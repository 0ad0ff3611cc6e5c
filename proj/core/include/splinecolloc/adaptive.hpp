#pragma once

// Adaptive collocation: move interior collocation points a step beta up the
// spatial gradient of the time derivative of the space-time surrogate, then
// project them back into their partition cells.

#include <cstddef>

#include <Eigen/Dense>

#include "splinecolloc/osc2d.hpp"
#include "splinecolloc/spacetime.hpp"

namespace splinecolloc::adaptive {

struct AdaptiveConfig {
  /// Step length; 0 selects default_beta(layout).
  double beta = 0.0;
  /// Clamp margin as a fraction of the cell width.
  double margin = 1e-6;
  /// Points whose gradient norm is below this do not move.
  double zero_gradient = 1e-12;
};

/// Half the smallest partition width over both axes.
double default_beta(const osc::PointLayout& layout);

/// d/dt of the surrogate at every layout point. t must lie strictly inside
/// the fitted time range.
Eigen::VectorXd time_derivative_field(const osc::SpaceTimeSurrogate& st, double t);

/// One steepest-ascent step on the scalar field `rate` (a surface over the
/// layout's partition). Boundary points stay put.
osc::PointLayout adapt_points(const osc::PointLayout& layout, const osc::SplineSolution2D& rate,
                              const AdaptiveConfig& cfg = {});

/// Same with rate = the surface through time_derivative_field(st, t).
osc::PointLayout adapt_points(const osc::SpaceTimeSurrogate& st, double t,
                              const AdaptiveConfig& cfg = {});

}  // namespace splinecolloc::adaptive

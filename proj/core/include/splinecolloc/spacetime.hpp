#pragma once

// Space-time surrogate: one time-oriented spline per collocation point, and a
// space-oriented surface fitted to the time splines at any query time.

#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "splinecolloc/osc1d.hpp"
#include "splinecolloc/osc2d.hpp"

namespace splinecolloc::osc {

class SpaceTimeSurrogate {
 public:
  /// frames: times x points, in the point order of `layout`.
  SpaceTimeSurrogate(std::vector<double> times, const RowMatrix& frames, PointLayout layout,
                     std::size_t time_order = 3);

  const PointLayout& layout() const noexcept { return space_.layout(); }
  const InterpSystem& time_system() const noexcept { return time_; }
  const Surface2dSystem& space_system() const noexcept { return space_; }
  double lower() const noexcept { return time_.breakpoints().front(); }
  double upper() const noexcept { return time_.breakpoints().back(); }

  /// d^deriv/dt^deriv of the time splines at every layout point.
  Eigen::VectorXd values_at(double t, int deriv_order = 0) const;
  /// Surface through values_at(t, deriv_order).
  SplineSolution2D surface_at(double t, int deriv_order = 0) const;
  double query(double x, double y, double t) const;

 private:
  InterpSystem time_;
  Surface2dSystem space_;
  RowMatrix time_coeffs_;  // unknowns x points
};

SpaceTimeSurrogate fit_spacetime(std::vector<double> times, const RowMatrix& frames,
                                 PointLayout layout, std::size_t time_order = 3);

}  // namespace splinecolloc::osc

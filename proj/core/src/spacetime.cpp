#include "splinecolloc/spacetime.hpp"

#include "splinecolloc/errors.hpp"

namespace splinecolloc::osc {

SpaceTimeSurrogate::SpaceTimeSurrogate(std::vector<double> times, const RowMatrix& frames,
                                       PointLayout layout, std::size_t time_order)
    : time_(std::move(times), time_order), space_(std::move(layout)) {
  if (static_cast<std::size_t>(frames.rows()) != time_.times().size() ||
      static_cast<std::size_t>(frames.cols()) != space_.points())
    throw DimensionMismatch("SpaceTimeSurrogate: frames must be times x layout points");
  time_coeffs_ = time_.solve_coefficients(frames);
}

Eigen::VectorXd SpaceTimeSurrogate::values_at(double t, int deriv_order) const {
  const auto ew = time_.eval_weights(t, deriv_order);
  Eigen::VectorXd v = Eigen::VectorXd::Zero(time_coeffs_.cols());
  for (std::size_t j = 0; j < ew.w.size(); ++j)
    v += ew.w[j] * time_coeffs_.row(static_cast<Eigen::Index>(ew.offset + j)).transpose();
  return v;
}

SplineSolution2D SpaceTimeSurrogate::surface_at(double t, int deriv_order) const {
  return space_.fit(values_at(t, deriv_order));
}

double SpaceTimeSurrogate::query(double x, double y, double t) const {
  return surface_at(t).evaluate(x, y);
}

SpaceTimeSurrogate fit_spacetime(std::vector<double> times, const RowMatrix& frames,
                                 PointLayout layout, std::size_t time_order) {
  return SpaceTimeSurrogate(std::move(times), frames, std::move(layout), time_order);
}

}  // namespace splinecolloc::osc

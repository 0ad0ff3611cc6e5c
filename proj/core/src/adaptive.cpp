#include "splinecolloc/adaptive.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "splinecolloc/errors.hpp"

namespace splinecolloc::adaptive {

double default_beta(const osc::PointLayout& layout) {
  double w = std::numeric_limits<double>::infinity();
  for (const auto* bp : {&layout.bx, &layout.by})
    for (std::size_t i = 0; i + 1 < bp->size(); ++i) w = std::min(w, (*bp)[i + 1] - (*bp)[i]);
  return 0.5 * w;
}

Eigen::VectorXd time_derivative_field(const osc::SpaceTimeSurrogate& st, double t) {
  if (!(t > st.lower() && t < st.upper()))
    throw DomainError("time_derivative_field: t must lie strictly inside the fitted time range");
  return st.values_at(t, 1);
}

osc::PointLayout adapt_points(const osc::PointLayout& layout, const osc::SplineSolution2D& rate,
                              const AdaptiveConfig& cfg) {
  const double beta = cfg.beta > 0.0 ? cfg.beta : default_beta(layout);
  if (beta > default_beta(layout) * (1 + 1e-12))
    throw InvalidArgument("adapt_points: beta exceeds half the smallest partition width");
  osc::PointLayout out = layout;
  const std::size_t nx = layout.nx_points();
  for (std::size_t k = 0; k < layout.points.size(); ++k) {
    if (layout.on_boundary(k)) continue;
    const std::size_t cx = layout.cell_x(k % nx), cy = layout.cell_y(k / nx);
    const Eigen::Vector2d p = layout.points[k];
    const Eigen::Vector2d g(rate.evaluate_in_cell(cx, cy, p.x(), p.y(), 1, 0),
                            rate.evaluate_in_cell(cx, cy, p.x(), p.y(), 0, 1));
    const double norm = g.norm();
    if (!(norm >= cfg.zero_gradient)) continue;
    const double mx = cfg.margin * (layout.bx[cx + 1] - layout.bx[cx]);
    const double my = cfg.margin * (layout.by[cy + 1] - layout.by[cy]);
    // Rounding in p + (beta / |g|) g can overshoot beta by an ulp; shave the
    // length until the realised displacement respects the bound.
    double len = beta;
    Eigen::Vector2d q;
    for (int tries = 0; tries < 8; ++tries) {
      const Eigen::Vector2d step = (len / norm) * g;
      q = {std::clamp(p.x() + step.x(), layout.bx[cx] + mx, layout.bx[cx + 1] - mx),
           std::clamp(p.y() + step.y(), layout.by[cy] + my, layout.by[cy + 1] - my)};
      if ((q - p).norm() <= beta) break;
      len *= 1.0 - 4.0 * std::numeric_limits<double>::epsilon();
    }
    out.points[k] = q;
  }
  return out;
}

osc::PointLayout adapt_points(const osc::SpaceTimeSurrogate& st, double t,
                              const AdaptiveConfig& cfg) {
  const Eigen::VectorXd rate = time_derivative_field(st, t);
  return adapt_points(st.layout(), st.space_system().fit(rate), cfg);
}

}  // namespace splinecolloc::adaptive

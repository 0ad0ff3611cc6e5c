#pragma once

// Space-oriented OSC on tensor-product partitions with bicubic Hermite bases.
//
// A surface carries four coefficients per breakpoint pair: value, d/dx, d/dy
// and d2/dxdy. Data live on (2 Nx + 2) x (2 Ny + 2) points: two collocation
// abscissae per cell and axis plus the boundary lines, which makes the
// interpolation problem square.

#include <array>
#include <cstddef>
#include <vector>

#include <Eigen/Dense>

#include "splinecolloc/abd.hpp"
#include "splinecolloc/basis.hpp"

namespace splinecolloc::osc {

/// Values on a tensor grid: values(j, i) is the datum at (xs[i], ys[j]).
/// Breakpoints may be left empty to use midpoints between collocation pairs.
struct CollocationField {
  std::vector<double> xs;
  std::vector<double> ys;
  RowMatrix values;
  std::vector<double> breakpoints_x;
  std::vector<double> breakpoints_y;
};

/// Boundary points and Gauss-Legendre points of a uniform or given partition.
std::vector<double> collocation_axis(const std::vector<double>& breakpoints);

template <class F>
CollocationField sample_field(const std::vector<double>& bx, const std::vector<double>& by, F&& f) {
  CollocationField field;
  field.xs = collocation_axis(bx);
  field.ys = collocation_axis(by);
  field.breakpoints_x = bx;
  field.breakpoints_y = by;
  field.values.resize(static_cast<Eigen::Index>(field.ys.size()),
                      static_cast<Eigen::Index>(field.xs.size()));
  for (std::size_t j = 0; j < field.ys.size(); ++j)
    for (std::size_t i = 0; i < field.xs.size(); ++i)
      field.values(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) =
          f(field.xs[i], field.ys[j]);
  return field;
}

enum class HermiteComponent { Value = 0, Dx = 1, Dy = 2, Dxy = 3 };

class SplineSolution2D {
 public:
  /// Each coefficient table is (Ny + 1) x (Nx + 1), indexed (y node, x node).
  SplineSolution2D(std::vector<double> bx, std::vector<double> by,
                   std::array<RowMatrix, 4> coeffs);

  const std::vector<double>& breakpoints_x() const noexcept { return bx_; }
  const std::vector<double>& breakpoints_y() const noexcept { return by_; }
  const RowMatrix& coeffs(HermiteComponent c) const { return coeffs_[static_cast<int>(c)]; }

  /// dx, dy in {0, 1, 2}. Throws DomainError outside the rectangle.
  double evaluate(double x, double y, int dx = 0, int dy = 0) const;
  /// Same, with the cell chosen by the caller (x, y may sit on its edge).
  double evaluate_in_cell(std::size_t cx, std::size_t cy, double x, double y, int dx = 0,
                          int dy = 0) const;

 private:
  std::vector<double> bx_;
  std::vector<double> by_;
  basis::HermiteBasis1D hx_;
  basis::HermiteBasis1D hy_;
  std::array<RowMatrix, 4> coeffs_;
};

/// Dimension-by-dimension fit: 1D interpolation along x for every data row,
/// then along y for every resulting Hermite coefficient. Only order 3.
SplineSolution2D fit_surface(const CollocationField& field, std::size_t order = 3);

double evaluate_surface(const SplineSolution2D& s, double x, double y, int dx = 0, int dy = 0);

/// Point layout for the assembled 2D system: the tensor collocation points in
/// row-major (y outer, x inner) order, possibly moved inside their cells.
struct PointLayout {
  std::vector<double> bx;
  std::vector<double> by;
  std::vector<Eigen::Vector2d> points;

  std::size_t nx_points() const noexcept { return 2 * (bx.size() - 1) + 2; }
  std::size_t ny_points() const noexcept { return 2 * (by.size() - 1) + 2; }
  /// Cell owning point (i, j) of the tensor layout.
  std::size_t cell_x(std::size_t i) const;
  std::size_t cell_y(std::size_t j) const;
  bool on_boundary(std::size_t k) const;

  static PointLayout tensor(std::vector<double> bx, std::vector<double> by);
};

/// The fully assembled interpolation system for a PointLayout. Unknowns are
/// ordered by y node, then x node, then component (value, dx, dy, dxy), which
/// gives an ABD matrix whose block rows are the rows of points of one cell row.
class Surface2dSystem {
 public:
  explicit Surface2dSystem(PointLayout layout);

  const PointLayout& layout() const noexcept { return layout_; }
  std::size_t points() const noexcept { return layout_.points.size(); }
  std::size_t unknowns() const noexcept { return points(); }

  const abd::AbdMatrix& matrix() const noexcept { return matrix_; }
  const abd::AbdFactorization& factorization() const noexcept { return factorization_; }

  /// values: points x channels, returns unknowns x channels.
  RowMatrix solve_coefficients(const RowMatrix& values) const;
  SplineSolution2D make_solution(const Eigen::Ref<const Eigen::VectorXd>& coeffs) const;
  SplineSolution2D fit(const Eigen::VectorXd& values) const;

  std::size_t unknown_index(std::size_t x_node, std::size_t y_node, HermiteComponent c) const;

  /// The 16 coefficients (index, weight) that produce the surface value or
  /// first partials at (x, y).
  struct EvalWeights {
    std::array<std::size_t, 16> index{};
    std::array<double, 16> weight{};
  };
  EvalWeights eval_weights(double x, double y, int dx = 0, int dy = 0) const;
  EvalWeights eval_weights_in_cell(std::size_t cx, std::size_t cy, double x, double y, int dx,
                                   int dy) const;

 private:
  PointLayout layout_;
  abd::AbdMatrix matrix_;
  abd::AbdFactorization factorization_;
};

}  // namespace splinecolloc::osc

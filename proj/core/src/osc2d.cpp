#include "splinecolloc/osc2d.hpp"

#include <string>

#include "splinecolloc/errors.hpp"
#include "splinecolloc/osc1d.hpp"

namespace splinecolloc::osc {

std::vector<double> collocation_axis(const std::vector<double>& breakpoints) {
  return basis::PartitionGrid(breakpoints, 3).collocation_points_with_boundary();
}

// --- SplineSolution2D --------------------------------------------------------

SplineSolution2D::SplineSolution2D(std::vector<double> bx, std::vector<double> by,
                                   std::array<RowMatrix, 4> coeffs)
    : bx_(std::move(bx)), by_(std::move(by)), hx_(bx_), hy_(by_), coeffs_(std::move(coeffs)) {
  for (const auto& c : coeffs_) {
    if (static_cast<std::size_t>(c.rows()) != by_.size() ||
        static_cast<std::size_t>(c.cols()) != bx_.size())
      throw DimensionMismatch("SplineSolution2D: coefficient table has the wrong shape");
  }
}

double SplineSolution2D::evaluate_in_cell(std::size_t cx, std::size_t cy, double x, double y,
                                          int dx, int dy) const {
  const double hxw = bx_[cx + 1] - bx_[cx];
  const double hyw = by_[cy + 1] - by_[cy];
  const auto wx = basis::hermite_shape((x - bx_[cx]) / hxw, hxw, dx);
  const auto wy = basis::hermite_shape((y - by_[cy]) / hyw, hyw, dy);
  double acc = 0.0;
  for (int b = 0; b < 4; ++b) {
    const auto ny = static_cast<Eigen::Index>(cy + static_cast<std::size_t>(b / 2));
    for (int a = 0; a < 4; ++a) {
      const auto nx = static_cast<Eigen::Index>(cx + static_cast<std::size_t>(a / 2));
      acc += wx[a] * wy[b] * coeffs_[(a % 2) + 2 * (b % 2)](ny, nx);
    }
  }
  return acc;
}

double SplineSolution2D::evaluate(double x, double y, int dx, int dy) const {
  return evaluate_in_cell(hx_.locate(x), hy_.locate(y), x, y, dx, dy);
}

double evaluate_surface(const SplineSolution2D& s, double x, double y, int dx, int dy) {
  return s.evaluate(x, y, dx, dy);
}

// --- dimension-by-dimension fit ----------------------------------------------

namespace {

// Hermite nodal data (value, slope interleaved per node) of the splines whose
// coefficients are the columns of `coeffs`.
RowMatrix to_hermite(const InterpSystem& sys, const RowMatrix& coeffs) {
  const auto& bp = sys.breakpoints();
  RowMatrix out(static_cast<Eigen::Index>(2 * bp.size()), coeffs.cols());
  for (std::size_t i = 0; i < bp.size(); ++i) {
    for (int d = 0; d < 2; ++d) {
      const auto ew = sys.eval_weights(bp[i], d);
      auto row = out.row(static_cast<Eigen::Index>(2 * i + static_cast<std::size_t>(d)));
      row.setZero();
      for (std::size_t j = 0; j < ew.w.size(); ++j)
        row += ew.w[j] * coeffs.row(static_cast<Eigen::Index>(ew.offset + j));
    }
  }
  return out;
}

}  // namespace

SplineSolution2D fit_surface(const CollocationField& field, std::size_t order) {
  if (order != 3) throw InvalidArgument("fit_surface: only cubic Hermite surfaces (order 3)");
  const std::size_t nx = field.xs.size(), ny = field.ys.size();
  if (static_cast<std::size_t>(field.values.rows()) != ny ||
      static_cast<std::size_t>(field.values.cols()) != nx)
    throw DimensionMismatch("fit_surface: values must be ys.size() x xs.size()");
  if (!field.values.allFinite()) throw InvalidArgument("fit_surface: non-finite value");
  const std::vector<double> bx =
      field.breakpoints_x.empty() ? default_breakpoints(field.xs, 3) : field.breakpoints_x;
  const std::vector<double> by =
      field.breakpoints_y.empty() ? default_breakpoints(field.ys, 3) : field.breakpoints_y;

  const InterpSystem sx(bx, field.xs, 3);
  const RowMatrix hx = to_hermite(sx, sx.solve_coefficients(field.values.transpose()));
  const InterpSystem sy(by, field.ys, 3);
  const RowMatrix h = to_hermite(sy, sy.solve_coefficients(hx.transpose()));

  std::array<RowMatrix, 4> c;
  for (auto& m : c)
    m.resize(static_cast<Eigen::Index>(by.size()), static_cast<Eigen::Index>(bx.size()));
  for (Eigen::Index j = 0; j < static_cast<Eigen::Index>(by.size()); ++j) {
    for (Eigen::Index i = 0; i < static_cast<Eigen::Index>(bx.size()); ++i) {
      c[0](j, i) = h(2 * j, 2 * i);
      c[1](j, i) = h(2 * j, 2 * i + 1);
      c[2](j, i) = h(2 * j + 1, 2 * i);
      c[3](j, i) = h(2 * j + 1, 2 * i + 1);
    }
  }
  return SplineSolution2D(bx, by, std::move(c));
}

// --- PointLayout -------------------------------------------------------------

std::size_t PointLayout::cell_x(std::size_t i) const {
  const std::size_t n = nx_points();
  if (i >= n) throw InvalidArgument("PointLayout: x index out of range");
  return i == 0 ? 0 : (i == n - 1 ? bx.size() - 2 : (i - 1) / 2);
}

std::size_t PointLayout::cell_y(std::size_t j) const {
  const std::size_t n = ny_points();
  if (j >= n) throw InvalidArgument("PointLayout: y index out of range");
  return j == 0 ? 0 : (j == n - 1 ? by.size() - 2 : (j - 1) / 2);
}

bool PointLayout::on_boundary(std::size_t k) const {
  const std::size_t i = k % nx_points(), j = k / nx_points();
  return i == 0 || j == 0 || i + 1 == nx_points() || j + 1 == ny_points();
}

PointLayout PointLayout::tensor(std::vector<double> bx, std::vector<double> by) {
  PointLayout l;
  const auto xs = collocation_axis(bx);
  const auto ys = collocation_axis(by);
  l.bx = std::move(bx);
  l.by = std::move(by);
  l.points.reserve(xs.size() * ys.size());
  for (double y : ys)
    for (double x : xs) l.points.emplace_back(x, y);
  return l;
}

// --- Surface2dSystem ---------------------------------------------------------

namespace {

void check_layout(const PointLayout& l) {
  if (l.bx.size() < 2 || l.by.size() < 2)
    throw InvalidArgument("PointLayout: need at least one cell per axis");
  if (l.points.size() != l.nx_points() * l.ny_points()) {
    throw DimensionMismatch("PointLayout: expected " +
                            std::to_string(l.nx_points() * l.ny_points()) + " points, got " +
                            std::to_string(l.points.size()));
  }
  const std::size_t nx = l.nx_points();
  for (std::size_t k = 0; k < l.points.size(); ++k) {
    const std::size_t cx = l.cell_x(k % nx), cy = l.cell_y(k / nx);
    const auto& p = l.points[k];
    if (!(p.x() >= l.bx[cx] && p.x() <= l.bx[cx + 1] && p.y() >= l.by[cy] && p.y() <= l.by[cy + 1]))
      throw InvalidArgument("PointLayout: point " + std::to_string(k) + " left its cell");
  }
}

abd::AbdMatrix assemble_surface(const PointLayout& l) {
  check_layout(l);
  const std::size_t Nx = l.bx.size() - 1, Ny = l.by.size() - 1;
  const std::size_t line = 4 * (Nx + 1);
  abd::AbdMatrix m(abd::BlockStructure::colrow(2 * (Nx + 1), line, Ny, line));
  const std::size_t nx = l.nx_points();
  for (std::size_t k = 0; k < l.points.size(); ++k) {
    const std::size_t cx = l.cell_x(k % nx), cy = l.cell_y(k / nx);
    const double hx = l.bx[cx + 1] - l.bx[cx], hy = l.by[cy + 1] - l.by[cy];
    const auto wx = basis::hermite_shape((l.points[k].x() - l.bx[cx]) / hx, hx, 0);
    const auto wy = basis::hermite_shape((l.points[k].y() - l.by[cy]) / hy, hy, 0);
    for (int b = 0; b < 4; ++b) {
      for (int a = 0; a < 4; ++a) {
        const double w = wx[a] * wy[b];
        if (w == 0.0) continue;
        const std::size_t col = (cy + static_cast<std::size_t>(b / 2)) * line +
                                4 * (cx + static_cast<std::size_t>(a / 2)) +
                                static_cast<std::size_t>((a % 2) + 2 * (b % 2));
        m.set(k, col, w);
      }
    }
  }
  return m;
}

abd::AbdFactorization factorize_surface(const abd::AbdMatrix& m, std::size_t cell_rows) {
  try {
    return abd::factorize(m);
  } catch (const SingularMatrix& e) {
    const std::size_t row = e.block() == 0 ? 0 : std::min(e.block() - 1, cell_rows - 1);
    throw SingularMatrix("2D OSC system is singular at cell row " + std::to_string(row) + " (" +
                             e.what() + ")",
                         row);
  }
}

}  // namespace

Surface2dSystem::Surface2dSystem(PointLayout layout)
    : layout_(std::move(layout)), matrix_(assemble_surface(layout_)),
      factorization_(factorize_surface(matrix_, layout_.by.size() - 1)) {}

std::size_t Surface2dSystem::unknown_index(std::size_t x_node, std::size_t y_node,
                                           HermiteComponent c) const {
  return y_node * 4 * layout_.bx.size() + 4 * x_node + static_cast<std::size_t>(c);
}

RowMatrix Surface2dSystem::solve_coefficients(const RowMatrix& values) const {
  if (static_cast<std::size_t>(values.rows()) != points())
    throw DimensionMismatch("Surface2dSystem: expected one value row per point");
  RowMatrix a = values;
  factorization_.solve_in_place(a);
  return a;
}

SplineSolution2D Surface2dSystem::make_solution(const Eigen::Ref<const Eigen::VectorXd>& coeffs) const {
  if (static_cast<std::size_t>(coeffs.size()) != unknowns())
    throw DimensionMismatch("Surface2dSystem: coefficient vector has the wrong length");
  std::array<RowMatrix, 4> c;
  const auto nbx = static_cast<Eigen::Index>(layout_.bx.size());
  const auto nby = static_cast<Eigen::Index>(layout_.by.size());
  for (int comp = 0; comp < 4; ++comp) {
    c[comp].resize(nby, nbx);
    for (Eigen::Index j = 0; j < nby; ++j)
      for (Eigen::Index i = 0; i < nbx; ++i)
        c[comp](j, i) = coeffs(static_cast<Eigen::Index>(
            unknown_index(static_cast<std::size_t>(i), static_cast<std::size_t>(j),
                          static_cast<HermiteComponent>(comp))));
  }
  return SplineSolution2D(layout_.bx, layout_.by, std::move(c));
}

SplineSolution2D Surface2dSystem::fit(const Eigen::VectorXd& values) const {
  RowMatrix v = values;
  const RowMatrix a = solve_coefficients(v);
  return make_solution(a.col(0));
}

Surface2dSystem::EvalWeights Surface2dSystem::eval_weights_in_cell(std::size_t cx, std::size_t cy,
                                                                   double x, double y, int dx,
                                                                   int dy) const {
  const auto& bx = layout_.bx;
  const auto& by = layout_.by;
  const double hx = bx[cx + 1] - bx[cx], hy = by[cy + 1] - by[cy];
  const auto wx = basis::hermite_shape((x - bx[cx]) / hx, hx, dx);
  const auto wy = basis::hermite_shape((y - by[cy]) / hy, hy, dy);
  EvalWeights ew;
  for (int b = 0; b < 4; ++b) {
    for (int a = 0; a < 4; ++a) {
      const int s = 4 * b + a;
      ew.weight[s] = wx[a] * wy[b];
      ew.index[s] = unknown_index(cx + static_cast<std::size_t>(a / 2),
                                  cy + static_cast<std::size_t>(b / 2),
                                  static_cast<HermiteComponent>((a % 2) + 2 * (b % 2)));
    }
  }
  return ew;
}

Surface2dSystem::EvalWeights Surface2dSystem::eval_weights(double x, double y, int dx,
                                                           int dy) const {
  return eval_weights_in_cell(basis::locate_cell(layout_.bx, x), basis::locate_cell(layout_.by, y),
                              x, y, dx, dy);
}

}  // namespace splinecolloc::osc

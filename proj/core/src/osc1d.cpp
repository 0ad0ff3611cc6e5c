#include "splinecolloc/osc1d.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "splinecolloc/errors.hpp"

namespace splinecolloc::osc {

using basis::PartitionGrid;

std::vector<double> cell_basis_row(Frame frame, double cell_left, double cell_width,
                                   std::size_t order, double x, int deriv_order) {
  std::vector<double> row(order + 1);
  if (frame == Frame::Global) {
    for (std::size_t j = 0; j <= order; ++j) row[j] = basis::monomial_term(j, x, deriv_order);
  } else {
    const double s = (x - cell_left) / cell_width;
    const double scale = std::pow(cell_width, -deriv_order);
    for (std::size_t j = 0; j <= order; ++j)
      row[j] = basis::monomial_term(j, s, deriv_order) * scale;
  }
  return row;
}

namespace {

std::size_t colloc_row(std::size_t cells, std::size_t order, std::size_t m) {
  const std::size_t per = order - 1;
  const std::size_t cell = m / per;
  const std::size_t j = m % per;
  return 1 + std::min(cell, cells - 1) * (order + 1) + j;
}

std::size_t block_to_cell(std::size_t block, std::size_t cells) {
  return block == 0 ? 0 : std::min(block - 1, cells - 1);
}

// Fills the ABD matrix for breakpoints `bp`; `colloc_fn(cell, x)` returns the
// collocation row for a point x of that cell.
template <class CollocFn>
abd::AbdMatrix assemble_matrix(const std::vector<double>& bp, std::size_t order, Frame frame,
                               const std::vector<double>& colloc, CollocFn&& colloc_fn) {
  const std::size_t N = bp.size() - 1;
  const std::size_t per = order - 1;
  const std::size_t w = order + 1;
  abd::AbdMatrix m(abd::BlockStructure::colrow(1, w, N - 1, w));
  auto width = [&](std::size_t i) { return bp[i + 1] - bp[i]; };
  auto put = [](RowMatrix& blk, std::size_t row, std::size_t col0, const std::vector<double>& v,
                double scale) {
    for (std::size_t j = 0; j < v.size(); ++j)
      blk(static_cast<Eigen::Index>(row), static_cast<Eigen::Index>(col0 + j)) = scale * v[j];
  };

  put(m.block(0), 0, 0, cell_basis_row(frame, bp[0], width(0), order, bp[0], 0), 1.0);
  for (std::size_t i = 0; i < N; ++i) {
    RowMatrix& blk = m.block(i + 1);
    for (std::size_t j = 0; j < per; ++j) put(blk, j, 0, colloc_fn(i, colloc[i * per + j]), 1.0);
    if (i + 1 < N) {
      const double x = bp[i + 1];
      const double dscale = frame == Frame::Local ? width(i) : 1.0;
      put(blk, per, 0, cell_basis_row(frame, bp[i], width(i), order, x, 0), 1.0);
      put(blk, per, w, cell_basis_row(frame, bp[i + 1], width(i + 1), order, x, 0), -1.0);
      put(blk, per + 1, 0, cell_basis_row(frame, bp[i], width(i), order, x, 1), dscale);
      put(blk, per + 1, w, cell_basis_row(frame, bp[i + 1], width(i + 1), order, x, 1), -dscale);
    } else {
      put(blk, per, 0, cell_basis_row(frame, bp[i], width(i), order, bp[N], 0), 1.0);
    }
  }
  return m;
}

void check_interp(const PartitionGrid& grid, const InterpSpec& spec) {
  const std::size_t per = grid.order() - 1;
  const std::size_t expect = grid.cells() * per + 2;
  if (spec.times.size() != expect) {
    throw InvalidArgument("OSC interpolation: " + std::to_string(spec.times.size()) +
                          " samples given, " + std::to_string(grid.cells()) + " cells of order " +
                          std::to_string(grid.order()) + " need " + std::to_string(expect));
  }
  if (spec.values.size() != spec.times.size())
    throw DimensionMismatch("OSC interpolation: times and values differ in length");
  for (std::size_t k = 1; k < spec.times.size(); ++k) {
    if (!(spec.times[k] > spec.times[k - 1]))
      throw InvalidArgument("OSC interpolation: times must be strictly increasing");
  }
  if (spec.times.front() != grid.lower() || spec.times.back() != grid.upper())
    throw InvalidArgument("OSC interpolation: first and last samples must sit on the domain ends");
  const auto& bp = grid.breakpoints();
  for (std::size_t m = 0; m + 2 < spec.times.size(); ++m) {
    const double t = spec.times[m + 1];
    const std::size_t cell = m / per;
    if (t < bp[cell] || t > bp[cell + 1]) {
      throw InvalidArgument("OSC interpolation: sample " + std::to_string(m + 1) + " at t = " +
                            std::to_string(t) + " lies outside cell " + std::to_string(cell));
    }
  }
}

}  // namespace

// --- problem -----------------------------------------------------------------

Osc1dProblem Osc1dProblem::ode(PartitionGrid grid, OdeSpec spec, Frame frame) {
  if (!spec.rhs) throw InvalidArgument("OSC ODE problem needs a right-hand side");
  if (spec.c0 == 0.0 && spec.c1 == 0.0 && spec.c2 == 0.0)
    throw InvalidArgument("OSC ODE problem has a zero operator");
  return Osc1dProblem(std::move(grid), std::move(spec), frame);
}

std::vector<double> default_breakpoints(const std::vector<double>& times, std::size_t order) {
  if (order < 2) throw InvalidArgument("OSC interpolation: order must be at least 2");
  const std::size_t per = order - 1;
  if (times.size() < order + 1 || (times.size() - 2) % per != 0) {
    const std::size_t n = times.size() < 2 ? 0 : times.size() - 2;
    const std::size_t lo = std::max<std::size_t>(n / per, 1) * per + 2;
    const std::size_t hi = lo > times.size() ? lo + per : (n / per + 1) * per + 2;
    throw InvalidArgument("OSC interpolation: " + std::to_string(times.size()) +
                          " samples do not split into cells of " + std::to_string(per) +
                          " interior samples for order " + std::to_string(order) +
                          "; valid lengths are 2 + k*" + std::to_string(per) + ", e.g. " +
                          std::to_string(lo) + " or " + std::to_string(hi));
  }
  const std::size_t N = (times.size() - 2) / per;
  std::vector<double> bp;
  bp.reserve(N + 1);
  bp.push_back(times.front());
  for (std::size_t i = 1; i < N; ++i) bp.push_back(0.5 * (times[i * per] + times[i * per + 1]));
  bp.push_back(times.back());
  return bp;
}

Osc1dProblem Osc1dProblem::interp(std::vector<double> times, std::vector<double> values,
                                  std::size_t order, Frame frame) {
  auto bp = default_breakpoints(times, order);
  return interp(std::move(bp), std::move(times), std::move(values), order, frame);
}

Osc1dProblem Osc1dProblem::interp(std::vector<double> breakpoints, std::vector<double> times,
                                  std::vector<double> values, std::size_t order, Frame frame) {
  PartitionGrid grid(std::move(breakpoints), order);
  InterpSpec spec{std::move(times), std::move(values)};
  check_interp(grid, spec);
  return Osc1dProblem(std::move(grid), std::move(spec), frame);
}

std::vector<double> Osc1dProblem::collocation_points() const {
  if (is_ode()) return grid_.collocation_points();
  const auto& t = interp_spec().times;
  return std::vector<double>(t.begin() + 1, t.end() - 1);
}

// --- solution ----------------------------------------------------------------

SplineSolution1D::SplineSolution1D(std::vector<double> breakpoints, std::size_t order,
                                   RowMatrix coeffs, Frame frame)
    : breakpoints_(std::move(breakpoints)), order_(order), coeffs_(std::move(coeffs)),
      frame_(frame) {
  if (breakpoints_.size() < 2) throw InvalidArgument("SplineSolution1D: need two breakpoints");
  if (static_cast<std::size_t>(coeffs_.rows()) != cells() ||
      static_cast<std::size_t>(coeffs_.cols()) != order_ + 1)
    throw DimensionMismatch("SplineSolution1D: coefficient table has the wrong shape");
}

double SplineSolution1D::evaluate_cell(std::size_t cell, double t, int deriv_order) const {
  if (deriv_order < 0 || deriv_order > 2)
    throw InvalidArgument("SplineSolution1D: derivative order must be 0, 1 or 2");
  const double* c = &coeffs_(static_cast<Eigen::Index>(cell), 0);
  const double x0 = breakpoints_[cell];
  const double h = breakpoints_[cell + 1] - x0;
  const double s = frame_ == Frame::Local ? (t - x0) / h : t;
  double acc = 0.0;
  for (std::size_t j = order_ + 1; j-- > static_cast<std::size_t>(deriv_order);) {
    double a = c[j];
    for (int m = 0; m < deriv_order; ++m) a *= static_cast<double>(j - static_cast<std::size_t>(m));
    acc = acc * s + a;
  }
  if (frame_ == Frame::Local) acc *= std::pow(h, -deriv_order);
  return acc;
}

double SplineSolution1D::evaluate(double t, int deriv_order) const {
  if (!(t >= lower() && t <= upper())) {
    throw DomainError("SplineSolution1D: t = " + std::to_string(t) + " outside [" +
                      std::to_string(lower()) + ", " + std::to_string(upper()) + "]");
  }
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  const std::size_t cell =
      std::min(static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - breakpoints_.begin() - 1, 0)),
               cells() - 1);
  return evaluate_cell(cell, t, deriv_order);
}

std::vector<double> SplineSolution1D::global_monomial_coeffs(std::size_t cell) const {
  if (cell >= cells()) throw InvalidArgument("SplineSolution1D: cell out of range");
  std::vector<double> out(order_ + 1, 0.0);
  const auto row = coeffs_.row(static_cast<Eigen::Index>(cell));
  if (frame_ == Frame::Global) {
    for (std::size_t j = 0; j <= order_; ++j) out[j] = row(static_cast<Eigen::Index>(j));
    return out;
  }
  // sum_j a_j ((x - x0)/h)^j expanded binomially.
  const double x0 = breakpoints_[cell];
  const double h = breakpoints_[cell + 1] - x0;
  for (std::size_t j = 0; j <= order_; ++j) {
    const double aj = row(static_cast<Eigen::Index>(j)) / std::pow(h, static_cast<double>(j));
    double binom = 1.0;
    for (std::size_t m = 0; m <= j; ++m) {
      out[m] += aj * binom * std::pow(-x0, static_cast<double>(j - m));
      binom = binom * static_cast<double>(j - m) / static_cast<double>(m + 1);
    }
  }
  return out;
}

// --- system ------------------------------------------------------------------

Osc1dSystem build_system(const Osc1dProblem& p) {
  const PartitionGrid& g = p.grid();
  const std::size_t r = g.order();
  const std::size_t N = g.cells();
  const auto& bp = g.breakpoints();
  const std::vector<double> colloc = p.collocation_points();
  const std::size_t n = N * (r + 1);
  Eigen::VectorXd rhs(static_cast<Eigen::Index>(n));

  if (p.is_ode()) {
    const OdeSpec& o = p.ode_spec();
    auto fn = [&](std::size_t cell, double x) {
      const double x0 = bp[cell], h = bp[cell + 1] - bp[cell];
      auto b0 = cell_basis_row(p.frame(), x0, h, r, x, 0);
      auto b1 = cell_basis_row(p.frame(), x0, h, r, x, 1);
      auto b2 = cell_basis_row(p.frame(), x0, h, r, x, 2);
      for (std::size_t j = 0; j <= r; ++j) b0[j] = o.c0 * b0[j] + o.c1 * b1[j] + o.c2 * b2[j];
      return b0;
    };
    abd::AbdMatrix m = assemble_matrix(bp, r, p.frame(), colloc, fn);
    rhs.setZero();
    rhs(0) = o.b1;
    for (std::size_t k = 0; k < colloc.size(); ++k)
      rhs(static_cast<Eigen::Index>(colloc_row(N, r, k))) = o.rhs(colloc[k]);
    rhs(static_cast<Eigen::Index>(n - 1)) = o.b2;
    return {std::move(m), std::move(rhs)};
  }

  const InterpSpec& s = p.interp_spec();
  auto fn = [&](std::size_t cell, double x) {
    return cell_basis_row(p.frame(), bp[cell], bp[cell + 1] - bp[cell], r, x, 0);
  };
  abd::AbdMatrix m = assemble_matrix(bp, r, p.frame(), colloc, fn);
  rhs.setZero();
  rhs(0) = s.values.front();
  for (std::size_t k = 0; k < colloc.size(); ++k)
    rhs(static_cast<Eigen::Index>(colloc_row(N, r, k))) = s.values[k + 1];
  rhs(static_cast<Eigen::Index>(n - 1)) = s.values.back();
  return {std::move(m), std::move(rhs)};
}

namespace {

abd::AbdFactorization factorize_cells(const abd::AbdMatrix& m, std::size_t cells) {
  try {
    return abd::factorize(m);
  } catch (const SingularMatrix& e) {
    const std::size_t cell = block_to_cell(e.block(), cells);
    throw SingularMatrix("OSC system is singular at cell " + std::to_string(cell) + " (" +
                             e.what() + ")",
                         cell);
  }
}

RowMatrix reshape_coeffs(const Eigen::Ref<const Eigen::VectorXd>& a, std::size_t cells,
                         std::size_t order) {
  RowMatrix c(static_cast<Eigen::Index>(cells), static_cast<Eigen::Index>(order + 1));
  for (Eigen::Index i = 0; i < c.rows(); ++i)
    for (Eigen::Index j = 0; j < c.cols(); ++j) c(i, j) = a(i * c.cols() + j);
  return c;
}

}  // namespace

SplineSolution1D solve_osc1d(const Osc1dProblem& p) {
  const Osc1dSystem sys = build_system(p);
  const std::size_t N = p.grid().cells();
  const abd::AbdFactorization fac = factorize_cells(sys.matrix, N);
  const Eigen::VectorXd a = fac.solve(sys.rhs);
  SplineSolution1D sol(p.grid().breakpoints(), p.grid().order(),
                       reshape_coeffs(a, N, p.grid().order()), p.frame());
  sol.set_condition(abd::condition_estimate(sys.matrix, fac));
  return sol;
}

// --- reusable interpolation system -------------------------------------------

namespace {

abd::AbdMatrix interp_matrix(const std::vector<double>& bp, const std::vector<double>& times,
                             std::size_t order, Frame frame) {
  PartitionGrid grid(bp, order);
  check_interp(grid, InterpSpec{times, std::vector<double>(times.size(), 0.0)});
  const std::vector<double> colloc(times.begin() + 1, times.end() - 1);
  auto fn = [&](std::size_t cell, double x) {
    return cell_basis_row(frame, bp[cell], bp[cell + 1] - bp[cell], order, x, 0);
  };
  return assemble_matrix(bp, order, frame, colloc, fn);
}

}  // namespace

InterpSystem::InterpSystem(std::vector<double> breakpoints, std::vector<double> times,
                           std::size_t order, Frame frame)
    : breakpoints_(std::move(breakpoints)), times_(std::move(times)), order_(order),
      frame_(frame), matrix_(interp_matrix(breakpoints_, times_, order_, frame_)),
      factorization_(factorize_cells(matrix_, breakpoints_.size() - 1)) {
  const std::size_t N = cells();
  sample_rows_.resize(times_.size());
  sample_rows_.front() = 0;
  for (std::size_t k = 1; k + 1 < times_.size(); ++k) sample_rows_[k] = colloc_row(N, order_, k - 1);
  sample_rows_.back() = unknowns() - 1;
}

InterpSystem::InterpSystem(std::vector<double> times, std::size_t order, Frame frame)
    : InterpSystem(default_breakpoints(times, order), times, order, frame) {}

RowMatrix InterpSystem::solve_coefficients(const RowMatrix& values) const {
  if (static_cast<std::size_t>(values.rows()) != times_.size())
    throw DimensionMismatch("InterpSystem: expected " + std::to_string(times_.size()) +
                            " samples, got " + std::to_string(values.rows()));
  RowMatrix rhs = RowMatrix::Zero(static_cast<Eigen::Index>(unknowns()), values.cols());
  for (std::size_t k = 0; k < sample_rows_.size(); ++k)
    rhs.row(static_cast<Eigen::Index>(sample_rows_[k])) = values.row(static_cast<Eigen::Index>(k));
  factorization_.solve_in_place(rhs);
  return rhs;
}

SplineSolution1D InterpSystem::make_solution(const Eigen::Ref<const Eigen::VectorXd>& coeffs) const {
  if (static_cast<std::size_t>(coeffs.size()) != unknowns())
    throw DimensionMismatch("InterpSystem: coefficient vector has the wrong length");
  return SplineSolution1D(breakpoints_, order_, reshape_coeffs(coeffs, cells(), order_), frame_);
}

SplineSolution1D InterpSystem::fit(const std::vector<double>& values) const {
  RowMatrix v(static_cast<Eigen::Index>(values.size()), 1);
  for (std::size_t k = 0; k < values.size(); ++k) v(static_cast<Eigen::Index>(k), 0) = values[k];
  const RowMatrix a = solve_coefficients(v);
  return make_solution(a.col(0));
}

InterpSystem::EvalWeights InterpSystem::eval_weights(double t, int deriv_order) const {
  if (!(t >= breakpoints_.front() && t <= breakpoints_.back()))
    throw DomainError("InterpSystem: t = " + std::to_string(t) + " outside the fitted range");
  const auto it = std::upper_bound(breakpoints_.begin(), breakpoints_.end(), t);
  const std::size_t cell = std::min(
      static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - breakpoints_.begin() - 1, 0)),
      cells() - 1);
  EvalWeights ew;
  ew.offset = cell * (order_ + 1);
  ew.w = cell_basis_row(frame_, breakpoints_[cell], breakpoints_[cell + 1] - breakpoints_[cell],
                        order_, t, deriv_order);
  return ew;
}

double InterpSystem::condition() const { return abd::condition_estimate(matrix_, factorization_); }

std::vector<SplineSolution1D> fit_time_series(const std::vector<double>& times,
                                              const RowMatrix& values, std::size_t order) {
  if (static_cast<std::size_t>(values.rows()) != times.size())
    throw DimensionMismatch("fit_time_series: values need one row per time");
  const InterpSystem sys(times, order);
  const RowMatrix a = sys.solve_coefficients(values);
  const double cond = sys.condition();
  std::vector<SplineSolution1D> out;
  out.reserve(static_cast<std::size_t>(values.cols()));
  for (Eigen::Index c = 0; c < values.cols(); ++c) {
    out.push_back(sys.make_solution(a.col(c)));
    out.back().set_condition(cond);
  }
  return out;
}

}  // namespace splinecolloc::osc

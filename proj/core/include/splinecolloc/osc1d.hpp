#pragma once

// One-dimensional orthogonal spline collocation.
//
// The unknowns are per-cell monomial coefficients, N (r + 1) of them for N
// cells of degree r. The constraints are ordered left boundary, then for each
// cell its collocation rows followed by the two C1 rows tying it to the next
// cell, then the right boundary. That ordering makes the system ABD with a
// one-row top block, N - 1 blocks of r + 1 rows and an r-row bottom block.

#include <cstddef>
#include <functional>
#include <optional>
#include <variant>
#include <vector>

#include <Eigen/Dense>

#include "splinecolloc/abd.hpp"
#include "splinecolloc/basis.hpp"

namespace splinecolloc::osc {

/// Coordinate in which per-cell monomials are written. Local uses
/// s = (x - x_i) / h_i on cell i and is the default; Global uses x itself.
enum class Frame { Local, Global };

/// c2 u'' + c1 u' + c0 u = rhs(x), u(lower) = b1, u(upper) = b2.
struct OdeSpec {
  double c0 = 0.0;
  double c1 = 0.0;
  double c2 = 0.0;
  std::function<double(double)> rhs;
  double b1 = 0.0;
  double b2 = 0.0;
};

/// Sampled values; the first and last sample are boundary values, the
/// interior samples are the collocation abscissae, r - 1 per cell.
struct InterpSpec {
  std::vector<double> times;
  std::vector<double> values;
};

class Osc1dProblem {
 public:
  static Osc1dProblem ode(basis::PartitionGrid grid, OdeSpec spec, Frame frame = Frame::Local);

  /// Breakpoints default to midpoints between consecutive groups of r - 1
  /// interior samples.
  static Osc1dProblem interp(std::vector<double> times, std::vector<double> values,
                             std::size_t order, Frame frame = Frame::Local);
  static Osc1dProblem interp(std::vector<double> breakpoints, std::vector<double> times,
                             std::vector<double> values, std::size_t order,
                             Frame frame = Frame::Local);

  const basis::PartitionGrid& grid() const noexcept { return grid_; }
  Frame frame() const noexcept { return frame_; }
  bool is_ode() const noexcept { return std::holds_alternative<OdeSpec>(mode_); }
  const OdeSpec& ode_spec() const { return std::get<OdeSpec>(mode_); }
  const InterpSpec& interp_spec() const { return std::get<InterpSpec>(mode_); }

  /// Interior collocation abscissae, cell by cell.
  std::vector<double> collocation_points() const;

 private:
  Osc1dProblem(basis::PartitionGrid grid, std::variant<OdeSpec, InterpSpec> mode, Frame frame)
      : grid_(std::move(grid)), mode_(std::move(mode)), frame_(frame) {}

  basis::PartitionGrid grid_;
  std::variant<OdeSpec, InterpSpec> mode_;
  Frame frame_;
};

class SplineSolution1D {
 public:
  /// `coeffs` is cells x (order + 1).
  SplineSolution1D(std::vector<double> breakpoints, std::size_t order, RowMatrix coeffs,
                   Frame frame = Frame::Local);

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  std::size_t cells() const noexcept { return breakpoints_.size() - 1; }
  std::size_t order() const noexcept { return order_; }
  Frame frame() const noexcept { return frame_; }
  const RowMatrix& coeffs() const noexcept { return coeffs_; }
  double lower() const noexcept { return breakpoints_.front(); }
  double upper() const noexcept { return breakpoints_.back(); }

  /// deriv_order 0, 1 or 2. Throws DomainError outside [lower, upper].
  double evaluate(double t, int deriv_order = 0) const;
  /// Evaluates the polynomial of a specific cell (also outside the cell).
  double evaluate_cell(std::size_t cell, double t, int deriv_order = 0) const;

  /// Coefficients of the cell polynomial in powers of the global x.
  std::vector<double> global_monomial_coeffs(std::size_t cell) const;

  /// Estimated 1-norm condition number of the system that produced this
  /// solution, when known.
  std::optional<double> condition() const noexcept { return condition_; }
  void set_condition(double c) { condition_ = c; }

 private:
  std::vector<double> breakpoints_;
  std::size_t order_;
  RowMatrix coeffs_;
  Frame frame_;
  std::optional<double> condition_;
};

struct Osc1dSystem {
  abd::AbdMatrix matrix;
  Eigen::VectorXd rhs;
};

Osc1dSystem build_system(const Osc1dProblem& p);

/// Throws SingularMatrix whose block() is the offending cell.
SplineSolution1D solve_osc1d(const Osc1dProblem& p);

/// Value or derivative of the basis monomials of one cell at x, as a row
/// acting on that cell's r + 1 coefficients.
std::vector<double> cell_basis_row(Frame frame, double cell_left, double cell_width,
                                   std::size_t order, double x, int deriv_order);

/// A factorized interpolation system that can be re-used for many value
/// vectors with the same sample abscissae.
class InterpSystem {
 public:
  InterpSystem(std::vector<double> breakpoints, std::vector<double> times, std::size_t order,
               Frame frame = Frame::Local);
  /// Default breakpoints (midpoints between sample groups).
  InterpSystem(std::vector<double> times, std::size_t order, Frame frame = Frame::Local);

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  const std::vector<double>& times() const noexcept { return times_; }
  std::size_t order() const noexcept { return order_; }
  std::size_t cells() const noexcept { return breakpoints_.size() - 1; }
  Frame frame() const noexcept { return frame_; }
  std::size_t unknowns() const noexcept { return cells() * (order_ + 1); }

  const abd::AbdMatrix& matrix() const noexcept { return matrix_; }
  const abd::AbdFactorization& factorization() const noexcept { return factorization_; }
  /// Row of the right-hand side that receives sample k.
  const std::vector<std::size_t>& sample_rows() const noexcept { return sample_rows_; }

  /// values: samples x channels. Returns unknowns x channels.
  RowMatrix solve_coefficients(const RowMatrix& values) const;
  SplineSolution1D fit(const std::vector<double>& values) const;
  /// Builds a solution from one column of solve_coefficients.
  SplineSolution1D make_solution(const Eigen::Ref<const Eigen::VectorXd>& coeffs) const;

  /// Linear functional mapping the coefficient vector to the value (or
  /// derivative) of the spline at t: sum_j w[j] * coeffs[offset + j].
  struct EvalWeights {
    std::size_t offset = 0;
    std::vector<double> w;
  };
  EvalWeights eval_weights(double t, int deriv_order = 0) const;

  double condition() const;

 private:
  std::vector<double> breakpoints_;
  std::vector<double> times_;
  std::size_t order_;
  Frame frame_;
  std::vector<std::size_t> sample_rows_;
  abd::AbdMatrix matrix_;
  abd::AbdFactorization factorization_;
};

/// Midpoints between consecutive groups of (order - 1) interior samples.
std::vector<double> default_breakpoints(const std::vector<double>& times, std::size_t order);

/// values: time x channels. One interpolating spline per channel.
std::vector<SplineSolution1D> fit_time_series(const std::vector<double>& times,
                                              const RowMatrix& values, std::size_t order);

}  // namespace splinecolloc::osc

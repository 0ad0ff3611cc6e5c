#pragma once

#include <array>
#include <cstddef>
#include <vector>

namespace splinecolloc::basis {

/// Roots of the degree-k Legendre polynomial mapped to (0, 1), ascending.
/// Supports 1 <= k <= 6.
std::vector<double> gauss_legendre_offsets(std::size_t k);

/// Value (deriv 0) or derivative (1, 2) of sum_j coeffs[j] x^j.
double monomial_eval(const std::vector<double>& coeffs, double x, int deriv_order);

/// d^deriv/dx^deriv of x^j, i.e. j!/(j-deriv)! x^(j-deriv), or 0.
double monomial_term(std::size_t j, double x, int deriv_order);

/// Cell of a sorted breakpoint list containing x; the right endpoint belongs
/// to the last cell. Throws DomainError outside the range.
std::size_t locate_cell(const std::vector<double>& breakpoints, double x);

/// One axis of a tensor-product partition: breakpoints, polynomial order and
/// Gauss-Legendre collocation offsets on the reference cell.
class PartitionGrid {
 public:
  /// Gauss-Legendre offsets with r - 1 points.
  PartitionGrid(std::vector<double> breakpoints, std::size_t order);
  PartitionGrid(std::vector<double> breakpoints, std::size_t order,
                std::vector<double> colloc_offsets);

  static PartitionGrid uniform(double a, double b, std::size_t cells, std::size_t order);

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  std::size_t cells() const noexcept { return breakpoints_.size() - 1; }
  std::size_t order() const noexcept { return order_; }
  const std::vector<double>& colloc_offsets() const noexcept { return offsets_; }

  double lower() const noexcept { return breakpoints_.front(); }
  double upper() const noexcept { return breakpoints_.back(); }
  double width(std::size_t cell) const { return breakpoints_.at(cell + 1) - breakpoints_.at(cell); }
  double min_width() const;

  /// Cell containing x; the right endpoint belongs to the last cell.
  /// Throws DomainError outside [lower, upper].
  std::size_t locate(double x) const;

  /// Interior collocation points, N (r - 1) of them, cell by cell.
  std::vector<double> collocation_points() const;
  /// Collocation points plus both domain endpoints.
  std::vector<double> collocation_points_with_boundary() const;

 private:
  std::vector<double> breakpoints_;
  std::size_t order_;
  std::vector<double> offsets_;
};

enum class HermiteKind { Value, Slope };

/// Cubic Hermite cardinal basis on a set of breakpoints: H_j (value) and
/// G_j (slope) for every node j.
class HermiteBasis1D {
 public:
  explicit HermiteBasis1D(std::vector<double> breakpoints);

  const std::vector<double>& breakpoints() const noexcept { return breakpoints_; }
  std::size_t nodes() const noexcept { return breakpoints_.size(); }
  std::size_t cells() const noexcept { return breakpoints_.size() - 1; }
  double lower() const noexcept { return breakpoints_.front(); }
  double upper() const noexcept { return breakpoints_.back(); }

  std::size_t locate(double x) const;

  /// deriv_order 0, 1 or 2. Zero outside the support of the function.
  double eval(std::size_t node, HermiteKind kind, double x, int deriv_order) const;

  /// The four basis functions nonzero on the cell containing x, in the order
  /// H_left, G_left, H_right, G_right.
  struct CellWeights {
    std::size_t cell = 0;
    std::array<double, 4> w{};
  };
  CellWeights cell_weights(double x, int deriv_order) const;

 private:
  std::vector<double> breakpoints_;
};

/// Reference-cell cubic Hermite shape functions on s in [0, 1] for a cell of
/// width h, ordered value-left, slope-left, value-right, slope-right, and
/// differentiated with respect to the physical coordinate.
std::array<double, 4> hermite_shape(double s, double h, int deriv_order);

}  // namespace splinecolloc::basis

#include "splinecolloc/basis.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "splinecolloc/errors.hpp"

namespace splinecolloc::basis {

std::vector<double> gauss_legendre_offsets(std::size_t k) {
  if (k < 1 || k > 6)
    throw InvalidArgument("gauss_legendre_offsets: k must be in [1, 6], got " + std::to_string(k));
  std::vector<double> nodes(k);
  const double pi = std::acos(-1.0);
  // Newton on P_k starting from the Chebyshev-like guess; only the
  // non-negative half is computed and mirrored so the result is symmetric.
  for (std::size_t i = 0; i < (k + 1) / 2; ++i) {
    double x = std::cos(pi * (static_cast<double>(i) + 0.75) / (static_cast<double>(k) + 0.5));
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0, p1 = x;
      for (std::size_t n = 2; n <= k; ++n) {
        const double p2 = ((2.0 * n - 1.0) * x * p1 - (n - 1.0) * p0) / static_cast<double>(n);
        p0 = p1;
        p1 = p2;
      }
      const double dp = static_cast<double>(k) * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    if (k % 2 == 1 && i == k / 2) x = 0.0;
    nodes[i] = 0.5 * (1.0 + x);
    nodes[k - 1 - i] = 0.5 * (1.0 - x);
  }
  std::sort(nodes.begin(), nodes.end());
  for (std::size_t i = 0; i < k / 2; ++i) nodes[k - 1 - i] = 1.0 - nodes[i];
  return nodes;
}

double monomial_term(std::size_t j, double x, int deriv_order) {
  if (deriv_order < 0) throw InvalidArgument("monomial_term: negative derivative order");
  const auto d = static_cast<std::size_t>(deriv_order);
  if (d > j) return 0.0;
  double c = 1.0;
  for (std::size_t m = 0; m < d; ++m) c *= static_cast<double>(j - m);
  double p = 1.0;
  for (std::size_t m = 0; m < j - d; ++m) p *= x;
  return c * p;
}

double monomial_eval(const std::vector<double>& coeffs, double x, int deriv_order) {
  if (deriv_order < 0 || deriv_order > 2)
    throw InvalidArgument("monomial_eval: derivative order must be 0, 1 or 2");
  double acc = 0.0;
  for (std::size_t j = coeffs.size(); j-- > static_cast<std::size_t>(deriv_order);) {
    double c = coeffs[j];
    for (int m = 0; m < deriv_order; ++m) c *= static_cast<double>(j - static_cast<std::size_t>(m));
    acc = acc * x + c;
  }
  return acc;
}

namespace {

void check_breakpoints(const std::vector<double>& b, const char* who) {
  if (b.size() < 2) throw InvalidArgument(std::string(who) + ": need at least 2 breakpoints");
  for (std::size_t i = 0; i < b.size(); ++i) {
    if (!std::isfinite(b[i])) throw InvalidArgument(std::string(who) + ": non-finite breakpoint");
    if (i > 0 && !(b[i] > b[i - 1]))
      throw InvalidArgument(std::string(who) + ": breakpoints must be strictly increasing");
  }
}

std::size_t locate_in(const std::vector<double>& b, double x, const char* who) {
  if (!(x >= b.front() && x <= b.back())) {
    throw DomainError(std::string(who) + ": x = " + std::to_string(x) + " outside [" +
                      std::to_string(b.front()) + ", " + std::to_string(b.back()) + "]");
  }
  const auto it = std::upper_bound(b.begin(), b.end(), x);
  const auto idx = static_cast<std::size_t>(it - b.begin());
  return std::min(idx == 0 ? 0 : idx - 1, b.size() - 2);
}

}  // namespace

std::size_t locate_cell(const std::vector<double>& breakpoints, double x) {
  return locate_in(breakpoints, x, "locate_cell");
}

PartitionGrid::PartitionGrid(std::vector<double> breakpoints, std::size_t order)
    : PartitionGrid(std::move(breakpoints), order,
                    order >= 2 && order <= 7 ? gauss_legendre_offsets(order - 1)
                                             : std::vector<double>{}) {}

PartitionGrid::PartitionGrid(std::vector<double> breakpoints, std::size_t order,
                             std::vector<double> colloc_offsets)
    : breakpoints_(std::move(breakpoints)), order_(order), offsets_(std::move(colloc_offsets)) {
  check_breakpoints(breakpoints_, "PartitionGrid");
  if (order_ < 2) throw InvalidArgument("PartitionGrid: order must be at least 2");
  if (offsets_.size() != order_ - 1)
    throw InvalidArgument("PartitionGrid: need order - 1 collocation offsets");
  for (std::size_t i = 0; i < offsets_.size(); ++i) {
    if (!(offsets_[i] > 0.0 && offsets_[i] < 1.0))
      throw InvalidArgument("PartitionGrid: collocation offsets must lie in (0, 1)");
    if (i > 0 && !(offsets_[i] > offsets_[i - 1]))
      throw InvalidArgument("PartitionGrid: collocation offsets must be strictly increasing");
  }
}

PartitionGrid PartitionGrid::uniform(double a, double b, std::size_t cells, std::size_t order) {
  if (cells == 0) throw InvalidArgument("PartitionGrid::uniform: need at least one cell");
  std::vector<double> bp(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i)
    bp[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(cells);
  bp.back() = b;
  return PartitionGrid(std::move(bp), order);
}

double PartitionGrid::min_width() const {
  double w = width(0);
  for (std::size_t i = 1; i < cells(); ++i) w = std::min(w, width(i));
  return w;
}

std::size_t PartitionGrid::locate(double x) const {
  return locate_in(breakpoints_, x, "PartitionGrid::locate");
}

std::vector<double> PartitionGrid::collocation_points() const {
  std::vector<double> pts;
  pts.reserve(cells() * offsets_.size());
  for (std::size_t i = 0; i < cells(); ++i)
    for (double o : offsets_) pts.push_back(breakpoints_[i] + o * width(i));
  return pts;
}

std::vector<double> PartitionGrid::collocation_points_with_boundary() const {
  std::vector<double> pts;
  pts.push_back(lower());
  for (double p : collocation_points()) pts.push_back(p);
  pts.push_back(upper());
  return pts;
}

// --- Hermite -----------------------------------------------------------------

std::array<double, 4> hermite_shape(double s, double h, int deriv_order) {
  const double s2 = s * s, s3 = s2 * s;
  switch (deriv_order) {
    case 0:
      return {2 * s3 - 3 * s2 + 1, h * (s3 - 2 * s2 + s), -2 * s3 + 3 * s2, h * (s3 - s2)};
    case 1:
      return {(6 * s2 - 6 * s) / h, 3 * s2 - 4 * s + 1, (-6 * s2 + 6 * s) / h, 3 * s2 - 2 * s};
    case 2:
      return {(12 * s - 6) / (h * h), (6 * s - 4) / h, (-12 * s + 6) / (h * h), (6 * s - 2) / h};
    default:
      throw InvalidArgument("hermite_shape: derivative order must be 0, 1 or 2");
  }
}

HermiteBasis1D::HermiteBasis1D(std::vector<double> breakpoints)
    : breakpoints_(std::move(breakpoints)) {
  check_breakpoints(breakpoints_, "HermiteBasis1D");
}

std::size_t HermiteBasis1D::locate(double x) const {
  return locate_in(breakpoints_, x, "HermiteBasis1D");
}

HermiteBasis1D::CellWeights HermiteBasis1D::cell_weights(double x, int deriv_order) const {
  CellWeights cw;
  cw.cell = locate(x);
  const double h = breakpoints_[cw.cell + 1] - breakpoints_[cw.cell];
  cw.w = hermite_shape((x - breakpoints_[cw.cell]) / h, h, deriv_order);
  return cw;
}

double HermiteBasis1D::eval(std::size_t node, HermiteKind kind, double x, int deriv_order) const {
  if (node >= nodes()) throw InvalidArgument("HermiteBasis1D::eval: node out of range");
  const std::size_t cell = locate(x);
  const std::size_t slot = kind == HermiteKind::Value ? 0 : 1;
  if (node != cell && node != cell + 1) return 0.0;
  const double h = breakpoints_[cell + 1] - breakpoints_[cell];
  const auto w = hermite_shape((x - breakpoints_[cell]) / h, h, deriv_order);
  return w[(node == cell ? 0 : 2) + slot];
}

}  // namespace splinecolloc::basis

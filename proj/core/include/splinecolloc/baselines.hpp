#pragma once

// Classical interpolators on 1D or tensor-product 2D samples, and the error
// comparison against OSC on the analytic test fields.

#include <array>
#include <cstddef>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "splinecolloc/abd.hpp"

namespace splinecolloc::baselines {

/// Cubic is the local C1 Catmull-Rom cubic (centred secant slopes); Spline is
/// the natural C2 cubic spline.
enum class Method { Nearest, Linear, Cubic, Spline };

std::string method_name(Method m);
Method parse_method(const std::string& name);

/// Piecewise interpolant through (xs[i], ys[i]), xs strictly increasing.
class Interpolator1D {
 public:
  Interpolator1D(std::vector<double> xs, std::vector<double> ys, Method method);

  /// Throws DomainError outside [xs.front(), xs.back()].
  double operator()(double x) const;
  Method method() const noexcept { return method_; }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  std::vector<double> slopes_;   // Cubic
  std::vector<double> second_;   // Spline
  Method method_;
};

std::vector<double> interpolate(Method m, const std::vector<double>& xs,
                                const std::vector<double>& ys, const std::vector<double>& queries);

/// values(j, i) sits at (xs[i], ys[j]). Returns a qy.size() x qx.size() grid.
RowMatrix interpolate(Method m, const std::vector<double>& xs, const std::vector<double>& ys,
                      const RowMatrix& values, const std::vector<double>& qx,
                      const std::vector<double>& qy);

inline std::vector<double> interp_nearest(const std::vector<double>& xs,
                                          const std::vector<double>& ys,
                                          const std::vector<double>& q) {
  return interpolate(Method::Nearest, xs, ys, q);
}
inline std::vector<double> interp_linear(const std::vector<double>& xs,
                                         const std::vector<double>& ys,
                                         const std::vector<double>& q) {
  return interpolate(Method::Linear, xs, ys, q);
}
inline std::vector<double> interp_cubic(const std::vector<double>& xs,
                                        const std::vector<double>& ys,
                                        const std::vector<double>& q) {
  return interpolate(Method::Cubic, xs, ys, q);
}

// --- comparison --------------------------------------------------------------

struct MethodError {
  std::string method;
  double error = 0.0;
};

/// Mean squared error of every method on one field at one resolution. All
/// methods see the same samples: the OSC collocation points (with boundary)
/// of `cells` uniform cells per axis.
struct Comparison {
  std::string problem;
  int dims = 1;
  std::size_t cells = 0;
  std::size_t order = 0;
  std::size_t points_per_axis = 0;
  /// nearest, linear, cubic, spline, osc
  std::vector<MethodError> rows;

  double error(const std::string& method) const;
};

/// 1D fields use OSC order 4, 2D fields order 3. Errors are measured on a
/// uniform grid of 2001 (1D) or 201 x 201 (2D) points over [0, 1]^dims.
Comparison compare_function(const std::string& name, int dims,
                            const std::function<double(double, double)>& f, std::size_t cells);
/// Throws InvalidArgument for unknown problem names.
Comparison compare_methods(const std::string& problem, std::size_t cells);

/// Target errors for nearest, linear, cubic and OSC on each analytic field.
std::array<double, 4> reference_errors(const std::string& problem);

struct Sweep {
  std::vector<Comparison> runs;
  std::size_t best = 0;
  const Comparison& best_run() const { return runs.at(best); }
};

/// Runs every cell count whose point count per axis lies in
/// [min_points, max_points] and marks the run whose nearest, linear, cubic
/// and OSC errors are closest to reference_errors in mean |log10| distance.
Sweep sweep_resolutions(const std::string& problem, std::size_t min_points = 8,
                        std::size_t max_points = 64);

/// Methods as rows, one column per comparison.
void write_comparison_csv(const std::vector<Comparison>& cols, std::ostream& out);

}  // namespace splinecolloc::baselines

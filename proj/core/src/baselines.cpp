#include "splinecolloc/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <ostream>

#include "splinecolloc/basis.hpp"
#include "splinecolloc/datagen.hpp"
#include "splinecolloc/errors.hpp"
#include "splinecolloc/osc1d.hpp"
#include "splinecolloc/osc2d.hpp"

namespace splinecolloc::baselines {

std::string method_name(Method m) {
  switch (m) {
    case Method::Nearest: return "nearest";
    case Method::Linear: return "linear";
    case Method::Cubic: return "cubic";
    case Method::Spline: return "spline";
  }
  return "?";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::Nearest, Method::Linear, Method::Cubic, Method::Spline})
    if (method_name(m) == name) return m;
  throw InvalidArgument("unknown interpolation method '" + name + "'");
}

Interpolator1D::Interpolator1D(std::vector<double> xs, std::vector<double> ys, Method method)
    : xs_(std::move(xs)), ys_(std::move(ys)), method_(method) {
  if (xs_.size() != ys_.size()) throw DimensionMismatch("Interpolator1D: xs and ys differ in size");
  if (xs_.size() < 2) throw InvalidArgument("Interpolator1D: need at least two samples");
  for (std::size_t i = 1; i < xs_.size(); ++i)
    if (!(xs_[i] > xs_[i - 1]))
      throw InvalidArgument("Interpolator1D: abscissae must be strictly increasing");
  const std::size_t n = xs_.size();

  if (method_ == Method::Cubic) {
    // Centred secants inside, one-sided secants at the ends.
    slopes_.resize(n);
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t a = i == 0 ? 0 : i - 1, b = i + 1 == n ? i : i + 1;
      slopes_[i] = (ys_[b] - ys_[a]) / (xs_[b] - xs_[a]);
    }
  } else if (method_ == Method::Spline) {
    // Natural spline: tridiagonal system for the second derivatives.
    second_.assign(n, 0.0);
    if (n > 2) {
      std::vector<double> diag(n - 2), upper(n - 2), rhs(n - 2);
      for (std::size_t i = 1; i + 1 < n; ++i) {
        const double h0 = xs_[i] - xs_[i - 1], h1 = xs_[i + 1] - xs_[i];
        diag[i - 1] = 2 * (h0 + h1);
        upper[i - 1] = h1;
        rhs[i - 1] = 6 * ((ys_[i + 1] - ys_[i]) / h1 - (ys_[i] - ys_[i - 1]) / h0);
      }
      for (std::size_t k = 1; k < n - 2; ++k) {
        const double m = upper[k - 1] / diag[k - 1];  // sub-diagonal equals previous upper
        diag[k] -= m * upper[k - 1];
        rhs[k] -= m * rhs[k - 1];
      }
      for (std::size_t k = n - 2; k-- > 0;) {
        double v = rhs[k];
        if (k + 1 < n - 2) v -= upper[k] * second_[k + 2];
        second_[k + 1] = v / diag[k];
      }
    }
  }
}

double Interpolator1D::operator()(double x) const {
  if (!(x >= xs_.front() && x <= xs_.back()))
    throw DomainError("interpolation query " + std::to_string(x) + " outside the sample hull");
  const auto it = std::upper_bound(xs_.begin(), xs_.end(), x);
  const std::size_t i =
      std::min(static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - xs_.begin() - 1, 0)),
               xs_.size() - 2);
  const double x0 = xs_[i], x1 = xs_[i + 1], h = x1 - x0;
  const double s = (x - x0) / h;
  switch (method_) {
    case Method::Nearest: return (x - x0 <= x1 - x) ? ys_[i] : ys_[i + 1];
    case Method::Linear: return (1 - s) * ys_[i] + s * ys_[i + 1];
    case Method::Cubic: {
      const double s2 = s * s, s3 = s2 * s;
      return (2 * s3 - 3 * s2 + 1) * ys_[i] + (s3 - 2 * s2 + s) * h * slopes_[i] +
             (-2 * s3 + 3 * s2) * ys_[i + 1] + (s3 - s2) * h * slopes_[i + 1];
    }
    case Method::Spline: {
      const double a = 1 - s;
      return a * ys_[i] + s * ys_[i + 1] +
             ((a * a * a - a) * second_[i] + (s * s * s - s) * second_[i + 1]) * h * h / 6.0;
    }
  }
  return 0.0;
}

std::vector<double> interpolate(Method m, const std::vector<double>& xs,
                                const std::vector<double>& ys, const std::vector<double>& queries) {
  const Interpolator1D f(xs, ys, m);
  std::vector<double> out(queries.size());
  std::transform(queries.begin(), queries.end(), out.begin(), [&](double q) { return f(q); });
  return out;
}

RowMatrix interpolate(Method m, const std::vector<double>& xs, const std::vector<double>& ys,
                      const RowMatrix& values, const std::vector<double>& qx,
                      const std::vector<double>& qy) {
  if (static_cast<std::size_t>(values.rows()) != ys.size() ||
      static_cast<std::size_t>(values.cols()) != xs.size())
    throw DimensionMismatch("interpolate: values must be ys.size() x xs.size()");
  const auto ny = static_cast<Eigen::Index>(ys.size());
  const auto nqx = static_cast<Eigen::Index>(qx.size());
  RowMatrix along_x(ny, nqx);
  for (Eigen::Index j = 0; j < ny; ++j) {
    const std::vector<double> row(values.row(j).begin(), values.row(j).end());
    const auto r = interpolate(m, xs, row, qx);
    for (Eigen::Index q = 0; q < nqx; ++q) along_x(j, q) = r[static_cast<std::size_t>(q)];
  }
  RowMatrix out(static_cast<Eigen::Index>(qy.size()), nqx);
  for (Eigen::Index q = 0; q < nqx; ++q) {
    const std::vector<double> col(along_x.col(q).begin(), along_x.col(q).end());
    const auto c = interpolate(m, ys, col, qy);
    for (std::size_t j = 0; j < qy.size(); ++j) out(static_cast<Eigen::Index>(j), q) = c[j];
  }
  return out;
}

// --- comparison --------------------------------------------------------------

double Comparison::error(const std::string& method) const {
  for (const auto& r : rows)
    if (r.method == method) return r.error;
  throw InvalidArgument("Comparison: no method '" + method + "'");
}

namespace {

std::vector<double> uniform_points(std::size_t n) {
  std::vector<double> q(n);
  for (std::size_t i = 0; i < n; ++i) q[i] = static_cast<double>(i) / static_cast<double>(n - 1);
  return q;
}

std::vector<double> uniform_breakpoints(std::size_t cells) { return uniform_points(cells + 1); }

constexpr Method kBaselines[] = {Method::Nearest, Method::Linear, Method::Cubic, Method::Spline};

}  // namespace

Comparison compare_function(const std::string& name, int dims,
                            const std::function<double(double, double)>& f, std::size_t cells) {
  if (dims != 1 && dims != 2) throw InvalidArgument("compare_function: dims must be 1 or 2");
  if (cells < 1) throw InvalidArgument("compare_function: need at least one cell");
  Comparison c;
  c.problem = name;
  c.dims = dims;
  c.cells = cells;
  c.order = dims == 1 ? 4 : 3;
  const auto bp = uniform_breakpoints(cells);

  if (dims == 1) {
    const auto grid = basis::PartitionGrid(bp, c.order);
    const auto xs = grid.collocation_points_with_boundary();
    c.points_per_axis = xs.size();
    std::vector<double> ys(xs.size());
    for (std::size_t i = 0; i < xs.size(); ++i) ys[i] = f(xs[i], 0.0);
    const auto q = uniform_points(2001);
    std::vector<double> exact(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) exact[i] = f(q[i], 0.0);
    auto mse = [&](const std::vector<double>& v) {
      double s = 0.0;
      for (std::size_t i = 0; i < q.size(); ++i) s += (v[i] - exact[i]) * (v[i] - exact[i]);
      return s / static_cast<double>(q.size());
    };
    for (Method m : kBaselines) c.rows.push_back({method_name(m), mse(interpolate(m, xs, ys, q))});
    const osc::InterpSystem sys(bp, xs, c.order);
    const auto sol = sys.fit(ys);
    std::vector<double> v(q.size());
    for (std::size_t i = 0; i < q.size(); ++i) v[i] = sol.evaluate(q[i]);
    c.rows.push_back({"osc", mse(v)});
    return c;
  }

  const auto field = osc::sample_field(bp, bp, f);
  c.points_per_axis = field.xs.size();
  const auto q = uniform_points(201);
  RowMatrix exact(201, 201);
  for (std::size_t j = 0; j < q.size(); ++j)
    for (std::size_t i = 0; i < q.size(); ++i)
      exact(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = f(q[i], q[j]);
  auto mse = [&](const RowMatrix& v) { return (v - exact).squaredNorm() / double(exact.size()); };
  for (Method m : kBaselines)
    c.rows.push_back({method_name(m), mse(interpolate(m, field.xs, field.ys, field.values, q, q))});
  const auto surf = osc::fit_surface(field, 3);
  RowMatrix v(201, 201);
  for (std::size_t j = 0; j < q.size(); ++j)
    for (std::size_t i = 0; i < q.size(); ++i)
      v(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(i)) = surf.evaluate(q[i], q[j]);
  c.rows.push_back({"osc", mse(v)});
  return c;
}

Comparison compare_methods(const std::string& problem, std::size_t cells) {
  const auto field = datagen::analytic_field(problem, 2);
  return compare_function(problem, field.dims, field.exact, cells);
}

std::array<double, 4> reference_errors(const std::string& problem) {
  if (problem == "1d-linear") return {2.3670e-6, 1.8928e-7, 3.5232e-12, 3.4153e-31};
  if (problem == "1d-nonlinear") return {1.7558e-2, 8.7731e-4, 2.2654e-7, 4.1948e-8};
  if (problem == "2d-linear") return {1.9882e-3, 3.4317e-4, 2.9117e-4, 1.7239e-32};
  if (problem == "2d-nonlinear") return {3.8695e-2, 1.1934e-2, 4.5441e-3, 3.4462e-5};
  throw InvalidArgument("no reference errors for problem '" + problem + "'");
}

Sweep sweep_resolutions(const std::string& problem, std::size_t min_points,
                        std::size_t max_points) {
  const int dims = datagen::analytic_field(problem, 2).dims;
  const auto ref = reference_errors(problem);
  const std::size_t per_cell = dims == 1 ? 3 : 2;  // interior points per cell and axis
  Sweep s;
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t cells = 1; per_cell * cells + 2 <= max_points; ++cells) {
    if (per_cell * cells + 2 < min_points) continue;
    s.runs.push_back(compare_methods(problem, cells));
    const auto& run = s.runs.back();
    const double got[4] = {run.error("nearest"), run.error("linear"), run.error("cubic"),
                           run.error("osc")};
    double score = 0.0;
    int terms = 0;
    for (int m = 0; m < 4; ++m) {
      if (ref[m] < 1e-20 || got[m] < 1e-20) continue;
      score += std::abs(std::log10(got[m] / ref[m]));
      ++terms;
    }
    score = terms ? score / terms : 0.0;
    if (score < best) {
      best = score;
      s.best = s.runs.size() - 1;
    }
  }
  if (s.runs.empty()) throw InvalidArgument("sweep_resolutions: empty resolution range");
  return s;
}

void write_comparison_csv(const std::vector<Comparison>& cols, std::ostream& out) {
  const auto prec = out.precision(6);
  out << "method";
  for (const auto& c : cols) out << ',' << c.problem;
  out << '\n';
  if (!cols.empty()) {
    for (std::size_t r = 0; r < cols.front().rows.size(); ++r) {
      out << cols.front().rows[r].method;
      for (const auto& c : cols) out << ',' << std::scientific << c.rows.at(r).error;
      out << std::defaultfloat << '\n';
    }
  }
  out.precision(prec);
}

}  // namespace splinecolloc::baselines

#include <algorithm>
#include <chrono>
#include <cmath>
#include <ostream>

#include "splinecolloc/abd.hpp"
#include "splinecolloc/errors.hpp"

namespace splinecolloc::abd {

namespace {

using Clock = std::chrono::steady_clock;

double median(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t m = v.size() / 2;
  return v.size() % 2 ? v[m] : 0.5 * (v[m - 1] + v[m]);
}

template <class F>
double time_median(F&& f, const ScalingOptions& opt) {
  std::vector<double> samples;
  double total = 0.0;
  while (samples.size() < opt.min_repeats || total < opt.min_time_s) {
    const auto t0 = Clock::now();
    f();
    const double dt = std::chrono::duration<double>(Clock::now() - t0).count();
    samples.push_back(dt);
    total += dt;
    if (samples.size() >= 100000) break;
  }
  return median(std::move(samples));
}

}  // namespace

BlockStructure scaling_structure(std::size_t n, const ScalingOptions& options) {
  std::size_t b = options.width == WidthRule::SqrtN
                      ? static_cast<std::size_t>(std::lround(std::sqrt(static_cast<double>(n))))
                      : options.fixed_width;
  b = std::max<std::size_t>(b, 2);
  const auto whole = static_cast<std::size_t>(
      std::lround(static_cast<double>(n) / static_cast<double>(b)));
  const std::size_t middle = std::max<std::size_t>(whole, 2) - 1;
  return BlockStructure::colrow(b / 2, b, middle, b);
}

ScalingTable benchmark_scaling(const std::vector<std::size_t>& sizes,
                               const ScalingOptions& options) {
  for (std::size_t i = 0; i < sizes.size(); ++i) {
    if (sizes[i] < 64) throw InvalidArgument("benchmark_scaling: sizes must be at least 64");
    if (i > 0 && sizes[i] <= sizes[i - 1])
      throw InvalidArgument("benchmark_scaling: sizes must be strictly increasing");
  }
  ScalingTable table;
  for (std::size_t idx = 0; idx < sizes.size(); ++idx) {
    const BlockStructure st = scaling_structure(sizes[idx], options);
    const AbdMatrix m = random_abd(st, options.seed + idx, 2.0);
    Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(st.dimension()),
                                                   -1.0, 1.0);
    std::optional<AbdFactorization> fac;
    ScalingRow row;
    row.requested_n = sizes[idx];
    row.n = st.dimension();
    row.block_rows = st.rows(std::min<std::size_t>(1, st.block_count() - 1));
    row.time_factorize_s = time_median([&] { fac.emplace(factorize(m)); }, options);
    Eigen::VectorXd x;
    row.time_solve_s = time_median([&] { x = fac->solve(f); }, options);
    table.rows.push_back(row);
  }
  if (table.rows.size() >= 2) {
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    const auto k = static_cast<double>(table.rows.size());
    for (const auto& r : table.rows) {
      const double lx = std::log(static_cast<double>(r.n));
      const double ly = std::log(r.time_factorize_s + r.time_solve_s);
      sx += lx; sy += ly; sxx += lx * lx; sxy += lx * ly;
    }
    table.fitted_exponent = (k * sxy - sx * sy) / (k * sxx - sx * sx);
  }
  return table;
}

void ScalingTable::write_csv(std::ostream& out) const {
  out << "n,time_factorize_s,time_solve_s\n";
  const auto flags = out.flags();
  const auto prec = out.precision(9);
  for (const auto& r : rows) {
    out << r.n << ',' << r.time_factorize_s << ',' << r.time_solve_s << '\n';
  }
  out.precision(prec);
  out.flags(flags);
}

}  // namespace splinecolloc::abd

#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "splinecolloc/errors.hpp"
#include "splinecolloc/osc2d.hpp"

using namespace splinecolloc;
using std::numbers::pi;

namespace {

std::vector<double> uniform(std::size_t cells, double a = 0.0, double b = 1.0) {
  std::vector<double> v(cells + 1);
  for (std::size_t i = 0; i <= cells; ++i) v[i] = a + (b - a) * static_cast<double>(i) / static_cast<double>(cells);
  return v;
}

double bicubic(double x, double y) {
  return 0.3 + x - 2 * y + x * y - 0.7 * x * x * x + 1.5 * x * x * y * y * y - y * y * y + 0.2 * x * x * x * y * y * y;
}

double wavy(double x, double y) { return std::sin(3 * pi * x) * std::cos(2 * pi * y) + x * y; }

Eigen::VectorXd values_at(const osc::PointLayout& l, double (*f)(double, double)) {
  Eigen::VectorXd v(static_cast<Eigen::Index>(l.points.size()));
  for (std::size_t k = 0; k < l.points.size(); ++k) v[static_cast<Eigen::Index>(k)] = f(l.points[k].x(), l.points[k].y());
  return v;
}

osc::PointLayout jittered(const std::vector<double>& bx, const std::vector<double>& by, unsigned seed) {
  auto l = osc::PointLayout::tensor(bx, by);
  std::mt19937 rng(seed);
  std::uniform_real_distribution<double> u(-0.15, 0.15);
  const std::size_t nx = l.nx_points(), ny = l.ny_points();
  for (std::size_t j = 0; j < ny; ++j)
    for (std::size_t i = 0; i < nx; ++i) {
      const std::size_t k = j * nx + i;
      if (l.on_boundary(k)) continue;
      const std::size_t cx = l.cell_x(i), cy = l.cell_y(j);
      const double wx = bx[cx + 1] - bx[cx], wy = by[cy + 1] - by[cy];
      l.points[k].x() = std::clamp(l.points[k].x() + u(rng) * wx, bx[cx] + 0.05 * wx, bx[cx + 1] - 0.05 * wx);
      l.points[k].y() = std::clamp(l.points[k].y() + u(rng) * wy, by[cy] + 0.05 * wy, by[cy + 1] - 0.05 * wy);
    }
  return l;
}

}  // namespace

TEST(Osc2d, TensorFitReproducesBicubics) {
  const auto bx = uniform(4), by = std::vector<double>{0.0, 0.2, 0.45, 0.7, 1.0};
  const auto s = osc::fit_surface(osc::sample_field(bx, by, bicubic));
  for (double x = 0; x <= 1.0; x += 0.05)
    for (double y = 0; y <= 1.0; y += 0.05) EXPECT_NEAR(s.evaluate(x, y), bicubic(x, y), 1e-11);
}

TEST(Osc2d, AssembledSystemReproducesBicubicsOnMovedPoints) {
  const auto bx = uniform(3), by = uniform(4);
  const auto l = jittered(bx, by, 5);
  const osc::Surface2dSystem sys(l);
  const auto s = sys.fit(values_at(l, bicubic));
  for (double x = 0; x <= 1.0; x += 0.05)
    for (double y = 0; y <= 1.0; y += 0.05) EXPECT_NEAR(s.evaluate(x, y), bicubic(x, y), 1e-11);
}

TEST(Osc2d, TensorAndAssembledSystemsAgree) {
  const auto bx = uniform(5), by = uniform(3);
  const auto field = osc::sample_field(bx, by, wavy);
  const auto a = osc::fit_surface(field);
  const osc::Surface2dSystem sys(osc::PointLayout::tensor(bx, by));
  const auto b = sys.fit(values_at(sys.layout(), wavy));
  for (int c = 0; c < 4; ++c) {
    const auto hc = static_cast<osc::HermiteComponent>(c);
    EXPECT_LT((a.coeffs(hc) - b.coeffs(hc)).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(Osc2d, AssembledSolveMatchesDenseOracle) {
  const auto l = jittered(uniform(3), uniform(3), 9);
  const osc::Surface2dSystem sys(l);
  const Eigen::VectorXd v = values_at(l, wavy);
  const Eigen::VectorXd want = oracle::dense_solve(sys.matrix().to_dense(), v);
  const RowMatrix got = sys.solve_coefficients(RowMatrix(v));
  EXPECT_LT(oracle::rel_error(got.col(0), want), 1e-10);
}

TEST(Osc2d, InterpolatesDataAtLayoutPoints) {
  const auto l = jittered(uniform(4), uniform(2), 2);
  const osc::Surface2dSystem sys(l);
  const Eigen::VectorXd v = values_at(l, wavy);
  const auto s = sys.fit(v);
  for (std::size_t k = 0; k < l.points.size(); ++k)
    EXPECT_NEAR(s.evaluate(l.points[k].x(), l.points[k].y()), v[static_cast<Eigen::Index>(k)], 1e-11);
}

TEST(Osc2d, C1AcrossInteriorBreakpoints) {
  const auto bx = uniform(4), by = uniform(3);
  const auto s = osc::fit_surface(osc::sample_field(bx, by, wavy));
  for (std::size_t i = 1; i + 1 < bx.size(); ++i)
    for (double y = 0.01; y < 1.0; y += 0.07)
      for (auto [dx, dy] : {std::pair{0, 0}, {1, 0}, {0, 1}}) {
        const std::size_t cy = std::min<std::size_t>(static_cast<std::size_t>(y * 3), 2);
        EXPECT_NEAR(s.evaluate_in_cell(i - 1, cy, bx[i], y, dx, dy), s.evaluate_in_cell(i, cy, bx[i], y, dx, dy), 1e-10);
      }
  for (std::size_t j = 1; j + 1 < by.size(); ++j)
    for (double x = 0.01; x < 1.0; x += 0.07)
      for (auto [dx, dy] : {std::pair{0, 0}, {1, 0}, {0, 1}}) {
        const std::size_t cx = std::min<std::size_t>(static_cast<std::size_t>(x * 4), 3);
        EXPECT_NEAR(s.evaluate_in_cell(cx, j - 1, x, by[j], dx, dy), s.evaluate_in_cell(cx, j, x, by[j], dx, dy), 1e-10);
      }
}

TEST(Osc2d, PartialsMatchFiniteDifferences) {
  const auto s = osc::fit_surface(osc::sample_field(uniform(6), uniform(6), wavy));
  for (double x : {0.13, 0.41, 0.77})
    for (double y : {0.22, 0.58, 0.9}) {
      EXPECT_NEAR(s.evaluate(x, y, 1, 0), oracle::central_difference([&](double t) { return s.evaluate(t, y); }, x, 1e-6), 1e-6);
      EXPECT_NEAR(s.evaluate(x, y, 0, 1), oracle::central_difference([&](double t) { return s.evaluate(x, t); }, y, 1e-6), 1e-6);
    }
}

TEST(Osc2d, EvalWeightsMatchEvaluate) {
  const auto l = jittered(uniform(3), uniform(3), 4);
  const osc::Surface2dSystem sys(l);
  const RowMatrix coeffs = sys.solve_coefficients(RowMatrix(values_at(l, wavy)));
  const auto s = sys.make_solution(coeffs.col(0));
  for (double x : {0.0, 0.3, 0.5, 1.0})
    for (double y : {0.0, 0.61, 1.0})
      for (auto [dx, dy] : {std::pair{0, 0}, {1, 0}, {0, 1}}) {
        const auto w = sys.eval_weights(x, y, dx, dy);
        double acc = 0;
        for (int k = 0; k < 16; ++k) acc += w.weight[k] * coeffs(static_cast<Eigen::Index>(w.index[k]), 0);
        EXPECT_NEAR(acc, s.evaluate(x, y, dx, dy), 1e-11);
      }
}

TEST(Osc2d, ConvergesOnSmoothField) {
  auto err = [](std::size_t n) {
    const auto s = osc::fit_surface(osc::sample_field(uniform(n), uniform(n), wavy));
    double e = 0;
    for (int i = 0; i <= 50; ++i)
      for (int j = 0; j <= 50; ++j) e = std::max(e, std::abs(s.evaluate(i / 50.0, j / 50.0) - wavy(i / 50.0, j / 50.0)));
    return e;
  };
  EXPECT_LT(err(16), err(8) / 8.0);
}

TEST(Osc2d, OutsideDomainThrows) {
  const auto s = osc::fit_surface(osc::sample_field(uniform(2), uniform(2), wavy));
  EXPECT_THROW(s.evaluate(1.1, 0.5), DomainError);
}

TEST(Osc2d, OnlyCubicOrderSupported) {
  EXPECT_THROW(osc::fit_surface(osc::sample_field(uniform(2), uniform(2), wavy), 4), InvalidArgument);
}

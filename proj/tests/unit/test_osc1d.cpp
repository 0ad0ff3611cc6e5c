#include <cmath>
#include <numbers>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "splinecolloc/errors.hpp"
#include "splinecolloc/osc1d.hpp"

using namespace splinecolloc;
using std::numbers::pi;

namespace {

osc::Osc1dProblem sine_problem(std::size_t cells, std::size_t order, osc::Frame frame) {
  osc::OdeSpec spec;
  spec.c0 = 1.0;
  spec.c1 = 1.0;
  spec.rhs = [](double x) { return std::sin(2 * pi * x) + 2 * pi * std::cos(2 * pi * x); };
  return osc::Osc1dProblem::ode(basis::PartitionGrid::uniform(0.0, 1.0, cells, order), spec, frame);
}

}  // namespace

// u + u' with two quadratic cells written in global monomials: boundary row,
// collocation row, value and slope continuity at x1, collocation row,
// boundary row.
TEST(Osc1d, TwoCellSystemMatchesHandAssembly) {
  const auto p = sine_problem(2, 2, osc::Frame::Global);
  const auto sys = osc::build_system(p);
  const double x1 = 0.5, xi0 = 0.25, xi1 = 0.75;
  Eigen::MatrixXd want(6, 6);
  want << 1, 0, 0, 0, 0, 0,
          1, xi0 + 1, xi0 * xi0 + 2 * xi0, 0, 0, 0,
          1, x1, x1 * x1, -1, -x1, -x1 * x1,
          0, 1, 2 * x1, 0, -1, -2 * x1,
          0, 0, 0, 1, xi1 + 1, xi1 * xi1 + 2 * xi1,
          0, 0, 0, 1, 1, 1;
  EXPECT_LT((sys.matrix.to_dense() - want).cwiseAbs().maxCoeff(), 1e-15);
  Eigen::VectorXd f(6);
  f << 0, p.ode_spec().rhs(xi0), 0, 0, p.ode_spec().rhs(xi1), 0;
  EXPECT_LT((sys.rhs - f).cwiseAbs().maxCoeff(), 1e-14);
}

TEST(Osc1d, SystemSolutionMatchesDenseOracle) {
  // Global monomials are far worse conditioned, hence the looser bound.
  for (auto [frame, tol] : {std::pair{osc::Frame::Local, 1e-9}, {osc::Frame::Global, 1e-6}}) {
    const auto p = sine_problem(5, 4, frame);
    const auto sys = osc::build_system(p);
    const auto sol = osc::solve_osc1d(p);
    const Eigen::VectorXd want = oracle::dense_solve(sys.matrix.to_dense(), sys.rhs);
    Eigen::VectorXd got(want.size());
    for (std::size_t c = 0; c < sol.cells(); ++c)
      for (std::size_t j = 0; j <= sol.order(); ++j)
        got[static_cast<Eigen::Index>(c * (sol.order() + 1) + j)] =
            sol.coeffs()(static_cast<Eigen::Index>(c), static_cast<Eigen::Index>(j));
    EXPECT_LT(oracle::rel_error(got, want), tol);
  }
}

TEST(Osc1d, SineExampleCoefficientsNearRoundedValues) {
  const auto sol = osc::solve_osc1d(sine_problem(3, 3, osc::Frame::Local));
  const double printed[3][4] = {{0.0, 6.2, -0.4, -31.4},
                                {1.5, 1.6, -13.8, 9.0},
                                {28.5, -100.0, 108.5, -37.0}};
  for (std::size_t c = 0; c < 3; ++c) {
    const auto g = sol.global_monomial_coeffs(c);
    for (std::size_t j = 0; j < 4; ++j) EXPECT_NEAR(g[j], printed[c][j], 0.1) << c << "," << j;
  }
}

TEST(Osc1d, LocalAndGlobalFramesAgree) {
  const auto a = osc::solve_osc1d(sine_problem(6, 4, osc::Frame::Local));
  const auto b = osc::solve_osc1d(sine_problem(6, 4, osc::Frame::Global));
  for (double x = 0; x <= 1.0; x += 0.01) EXPECT_NEAR(a.evaluate(x), b.evaluate(x), 1e-7);
}

TEST(Osc1d, ConvergesUnderRefinement) {
  auto err = [](std::size_t n) {
    const auto s = osc::solve_osc1d(sine_problem(n, 3, osc::Frame::Local));
    double e = 0;
    for (int i = 0; i <= 1000; ++i) {
      const double x = i / 1000.0;
      e = std::max(e, std::abs(s.evaluate(x) - std::sin(2 * pi * x)));
    }
    return e;
  };
  const double e8 = err(8), e16 = err(16);
  EXPECT_LT(e16, e8 / 8.0);
  EXPECT_LT(e16, 5e-4);
}

TEST(Osc1d, ReproducesPolynomialsUpToOrder) {
  for (std::size_t r = 2; r <= 6; ++r) {
    std::vector<double> c(r + 1);
    for (std::size_t j = 0; j <= r; ++j) c[j] = std::cos(1.0 + static_cast<double>(j));
    auto u = [&](double x, int d) { return basis::monomial_eval(c, x, d); };
    osc::OdeSpec spec;
    spec.c0 = 0.5;
    spec.c1 = -1.0;
    spec.c2 = 1.0;
    spec.rhs = [&](double x) { return u(x, 2) - u(x, 1) + 0.5 * u(x, 0); };
    spec.b1 = u(0.0, 0);
    spec.b2 = u(1.0, 0);
    const auto sol =
        osc::solve_osc1d(osc::Osc1dProblem::ode(basis::PartitionGrid::uniform(0, 1, 4, r), spec));
    for (double x = 0; x <= 1.0; x += 0.0125) EXPECT_NEAR(sol.evaluate(x), u(x, 0), 1e-11) << r;
  }
}

TEST(Osc1d, C1ContinuityAtBreakpoints) {
  for (auto frame : {osc::Frame::Local, osc::Frame::Global}) {
    const auto sol = osc::solve_osc1d(sine_problem(7, 4, frame));
    for (std::size_t c = 0; c + 1 < sol.cells(); ++c) {
      const double x = sol.breakpoints()[c + 1];
      for (int d = 0; d <= 1; ++d)
        EXPECT_NEAR(sol.evaluate_cell(c, x, d), sol.evaluate_cell(c + 1, x, d), 1e-10);
    }
  }
}

TEST(Osc1d, ZeroOperatorRejected) {
  osc::OdeSpec spec;
  spec.rhs = [](double) { return 0.0; };
  EXPECT_THROW(
      osc::solve_osc1d(osc::Osc1dProblem::ode(basis::PartitionGrid::uniform(0, 1, 3, 3), spec)),
      InvalidArgument);
}

TEST(Osc1d, EvaluateOutsideDomainThrows) {
  const auto sol = osc::solve_osc1d(sine_problem(3, 3, osc::Frame::Local));
  EXPECT_THROW(sol.evaluate(1.01), DomainError);
  EXPECT_THROW(sol.evaluate(-0.01), DomainError);
}

TEST(Osc1d, InterpolationHitsSamplesAndReproducesPolynomials) {
  const std::size_t r = 4;
  const auto grid = basis::PartitionGrid::uniform(0, 2, 5, r);
  const auto times = grid.collocation_points_with_boundary();
  auto u = [](double t) { return 1 - t + 0.25 * t * t * t - 0.1 * t * t * t * t; };
  std::vector<double> vals;
  for (double t : times) vals.push_back(u(t));
  const auto sol = osc::solve_osc1d(osc::Osc1dProblem::interp(times, vals, r));
  for (std::size_t k = 0; k < times.size(); ++k) EXPECT_NEAR(sol.evaluate(times[k]), vals[k], 1e-12);
  for (double t = 0; t <= 2.0; t += 0.01) EXPECT_NEAR(sol.evaluate(t), u(t), 1e-11);
  const auto bp = osc::default_breakpoints(times, r);
  ASSERT_EQ(bp.size(), 6u);
  for (std::size_t i = 0; i < bp.size(); ++i) EXPECT_NEAR(bp[i], grid.breakpoints()[i], 1e-12);
}

TEST(Osc1d, InterpSystemMultiChannelAndEvalWeights) {
  const std::vector<double> times{0, 1, 2, 3, 4, 5, 6, 7};
  const osc::InterpSystem sys(times, 3);
  RowMatrix v(8, 2);
  for (int k = 0; k < 8; ++k) {
    v(k, 0) = std::sin(0.4 * k);
    v(k, 1) = k * k - 3.0;
  }
  const RowMatrix coeffs = sys.solve_coefficients(v);
  for (int ch = 0; ch < 2; ++ch) {
    std::vector<double> col(8);
    for (int k = 0; k < 8; ++k) col[k] = v(k, ch);
    const auto direct = sys.fit(col);
    const auto from = sys.make_solution(coeffs.col(ch));
    for (double t = 0; t <= 7.0; t += 0.1) {
      EXPECT_NEAR(direct.evaluate(t), from.evaluate(t), 1e-12);
      for (int d = 0; d <= 2; ++d) {
        const auto w = sys.eval_weights(t, d);
        double acc = 0;
        for (std::size_t j = 0; j < w.w.size(); ++j)
          acc += w.w[j] * coeffs(static_cast<Eigen::Index>(w.offset + j), ch);
        EXPECT_NEAR(acc, direct.evaluate(t, d), 1e-10);
      }
    }
  }
  EXPECT_GT(sys.condition(), 1.0);
}

TEST(Osc1d, InterpRejectsWrongSampleCount) {
  EXPECT_THROW(osc::Osc1dProblem::interp({0, 0.5, 1, 1.5, 2}, {0, 0, 0, 0, 0}, 3), InvalidArgument);
}

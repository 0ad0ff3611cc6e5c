#include <cmath>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "splinecolloc/basis.hpp"
#include "splinecolloc/errors.hpp"

using namespace splinecolloc;

TEST(Basis, GaussLegendreMatchesRecurrenceRoots) {
  for (std::size_t k = 1; k <= 6; ++k) {
    const auto got = basis::gauss_legendre_offsets(k);
    const auto want = oracle::legendre_roots_unit(static_cast<int>(k));
    ASSERT_EQ(got.size(), k);
    ASSERT_EQ(want.size(), k);
    for (std::size_t i = 0; i < k; ++i) EXPECT_NEAR(got[i], want[i], 1e-14) << "k=" << k;
  }
  EXPECT_THROW(basis::gauss_legendre_offsets(0), InvalidArgument);
  EXPECT_THROW(basis::gauss_legendre_offsets(7), InvalidArgument);
}

TEST(Basis, TwoPointRule) {
  const auto g = basis::gauss_legendre_offsets(2);
  EXPECT_NEAR(g[0], 0.5 - 0.5 / std::sqrt(3.0), 1e-15);
  EXPECT_NEAR(g[1], 0.5 + 0.5 / std::sqrt(3.0), 1e-15);
}

TEST(Basis, MonomialDerivatives) {
  const std::vector<double> c{1.0, -2.0, 0.5, 3.0};
  const double x = 0.7;
  EXPECT_NEAR(basis::monomial_eval(c, x, 0), 1 - 2 * x + 0.5 * x * x + 3 * x * x * x, 1e-15);
  EXPECT_NEAR(basis::monomial_eval(c, x, 1), -2 + x + 9 * x * x, 1e-14);
  EXPECT_NEAR(basis::monomial_eval(c, x, 2), 1 + 18 * x, 1e-14);
  EXPECT_EQ(basis::monomial_term(2, x, 3), 0.0);
}

TEST(Basis, LocateCell) {
  const std::vector<double> bp{0.0, 0.25, 0.5, 1.0};
  EXPECT_EQ(basis::locate_cell(bp, 0.0), 0u);
  EXPECT_EQ(basis::locate_cell(bp, 0.25), 1u);
  EXPECT_EQ(basis::locate_cell(bp, 1.0), 2u);
  EXPECT_THROW(basis::locate_cell(bp, 1.0 + 1e-9), DomainError);
  EXPECT_THROW(basis::locate_cell(bp, -1e-9), DomainError);
}

TEST(Basis, PartitionCollocationPoints) {
  const auto g = basis::PartitionGrid::uniform(0.0, 1.0, 3, 3);
  const auto pts = g.collocation_points();
  ASSERT_EQ(pts.size(), 6u);
  const auto off = basis::gauss_legendre_offsets(2);
  for (std::size_t c = 0; c < 3; ++c)
    for (std::size_t k = 0; k < 2; ++k)
      EXPECT_NEAR(pts[2 * c + k], (static_cast<double>(c) + off[k]) / 3.0, 1e-15);
  const auto wb = g.collocation_points_with_boundary();
  EXPECT_EQ(wb.size(), 8u);
  EXPECT_EQ(wb.front(), 0.0);
  EXPECT_EQ(wb.back(), 1.0);
}

TEST(Basis, HermiteCardinality) {
  const basis::HermiteBasis1D h({0.0, 0.3, 0.55, 1.0});
  for (std::size_t j = 0; j < h.nodes(); ++j)
    for (std::size_t i = 0; i < h.nodes(); ++i) {
      const double x = h.breakpoints()[i];
      const double d = i == j ? 1.0 : 0.0;
      EXPECT_NEAR(h.eval(j, basis::HermiteKind::Value, x, 0), d, 1e-14);
      EXPECT_NEAR(h.eval(j, basis::HermiteKind::Value, x, 1), 0.0, 1e-12);
      EXPECT_NEAR(h.eval(j, basis::HermiteKind::Slope, x, 0), 0.0, 1e-14);
      EXPECT_NEAR(h.eval(j, basis::HermiteKind::Slope, x, 1), d, 1e-12);
    }
}

TEST(Basis, HermiteShapeDerivativesMatchDifferences) {
  const double h = 0.4;
  for (double s : {0.1, 0.5, 0.83}) {
    const auto d1 = basis::hermite_shape(s, h, 1);
    const auto d2 = basis::hermite_shape(s, h, 2);
    for (int k = 0; k < 4; ++k) {
      auto f0 = [&](double ss) { return basis::hermite_shape(ss, h, 0)[k]; };
      auto f1 = [&](double ss) { return basis::hermite_shape(ss, h, 1)[k]; };
      // ds = dx / h
      EXPECT_NEAR(d1[k], oracle::central_difference(f0, s, 1e-6) / h, 1e-7);
      EXPECT_NEAR(d2[k], oracle::central_difference(f1, s, 1e-6) / h, 1e-5);
    }
  }
}

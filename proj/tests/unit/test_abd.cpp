#include <random>

#include <gtest/gtest.h>

#include "oracles.hpp"
#include "splinecolloc/abd.hpp"
#include "splinecolloc/errors.hpp"

using namespace splinecolloc;

namespace {

struct Shape {
  std::size_t top, block_rows, blocks, overlap;
};

class AbdRandom : public ::testing::TestWithParam<Shape> {};

}  // namespace

TEST_P(AbdRandom, SolveMatchesDenseElimination) {
  const auto s = GetParam();
  const auto st = abd::BlockStructure::colrow(s.top, s.block_rows, s.blocks, s.overlap);
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto m = abd::random_abd(st, seed);
    const auto fac = abd::factorize(m);
    Eigen::VectorXd f = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(m.dimension()), -1, 2);
    const Eigen::VectorXd want = oracle::dense_solve(m.to_dense(), f);
    EXPECT_LT(oracle::rel_error(fac.solve(f), want), 1e-10);
    const Eigen::VectorXd want_t = oracle::dense_solve(Eigen::MatrixXd(m.to_dense().transpose()), f);
    EXPECT_LT(oracle::rel_error(fac.solve_transpose(f), want_t), 1e-10);
  }
}

TEST_P(AbdRandom, AdjointIdentity) {
  const auto s = GetParam();
  const auto st = abd::BlockStructure::colrow(s.top, s.block_rows, s.blocks, s.overlap);
  const auto m = abd::random_abd(st, 11);
  const auto fac = abd::factorize(m);
  std::mt19937_64 rng(3);
  std::normal_distribution<double> nd;
  const auto n = static_cast<Eigen::Index>(m.dimension());
  Eigen::VectorXd f(n), g(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    f[i] = nd(rng);
    g[i] = nd(rng);
  }
  // <A^-1 f, g> == <f, A^-T g>
  const double lhs = fac.solve(f).dot(g);
  const double rhs = f.dot(fac.solve_transpose(g));
  EXPECT_NEAR(lhs, rhs, 1e-10 * std::max(1.0, std::abs(lhs)));
}

INSTANTIATE_TEST_SUITE_P(Shapes, AbdRandom,
                         ::testing::Values(Shape{1, 4, 3, 4}, Shape{2, 5, 5, 4}, Shape{1, 2, 10, 2},
                                           Shape{3, 7, 4, 7}, Shape{1, 9, 12, 9}));

TEST(Abd, MultipleRightHandSides) {
  const auto st = abd::BlockStructure::colrow(2, 6, 6, 6);
  const auto m = abd::random_abd(st, 4);
  const auto fac = abd::factorize(m);
  RowMatrix rhs = RowMatrix::Random(static_cast<Eigen::Index>(m.dimension()), 3);
  RowMatrix x = rhs;
  fac.solve_in_place(x);
  const Eigen::MatrixXd want = oracle::dense_solve(m.to_dense(), Eigen::MatrixXd(rhs));
  EXPECT_LT(oracle::rel_error(x, want), 1e-10);
  RowMatrix y = rhs;
  fac.solve_transpose_in_place(y);
  const Eigen::MatrixXd want_t =
      oracle::dense_solve(Eigen::MatrixXd(m.to_dense().transpose()), Eigen::MatrixXd(rhs));
  EXPECT_LT(oracle::rel_error(y, want_t), 1e-10);
}

TEST(Abd, GeneralStructureWithFullOverlap) {
  abd::BlockStructure st({2, 4}, {3, 6}, {3});
  EXPECT_EQ(st.dimension(), 6u);
  const auto m = abd::random_abd(st, 9, 2.0);
  Eigen::VectorXd f = Eigen::VectorXd::Ones(6);
  EXPECT_LT(oracle::rel_error(abd::solve(abd::factorize(m), f), oracle::dense_solve(m.to_dense(), f)),
            1e-12);
}

TEST(Abd, MultiplyMatchesDense) {
  const auto m = abd::random_abd(abd::BlockStructure::colrow(1, 4, 4, 4), 1);
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(static_cast<Eigen::Index>(m.dimension()), 0, 1);
  EXPECT_LT((m.multiply(x) - m.to_dense() * x).norm(), 1e-13);
  EXPECT_LT((m.multiply_transpose(x) - m.to_dense().transpose() * x).norm(), 1e-13);
}

TEST(Abd, SetOutsideFootprintThrows) {
  abd::AbdMatrix m(abd::BlockStructure::colrow(1, 3, 3, 3));
  EXPECT_NO_THROW(m.set(0, 0, 1.0));
  EXPECT_THROW(m.set(0, m.dimension() - 1, 1.0), Error);
}

TEST(Abd, AssembleRejectsWrongBlockShape) {
  abd::BlockStructure st({2, 4}, {3, 6}, {3});
  std::vector<RowMatrix> blocks{RowMatrix::Zero(2, 3), RowMatrix::Zero(4, 5)};
  EXPECT_THROW(abd::assemble(st, blocks), DimensionMismatch);
}

TEST(Abd, NonSquareLayoutRejected) {
  EXPECT_THROW(abd::BlockStructure({2, 3}, {3, 6}, {3}), InvalidArgument);
}

TEST(Abd, SingularBlockReported) {
  abd::AbdMatrix m(abd::BlockStructure::colrow(1, 3, 3, 3));
  const auto n = m.dimension();
  for (std::size_t i = 0; i < n; ++i) m.set(i, i, 1.0);
  // Knock out the pivot of the last full block.
  m.set(n - 2, n - 2, 0.0);
  try {
    abd::factorize(m);
    FAIL() << "expected SingularMatrix";
  } catch (const SingularMatrix& e) {
    EXPECT_LT(e.block(), m.structure().block_count());
  }
}

TEST(Abd, ConditionEstimateWithinDenseBounds) {
  const auto m = abd::random_abd(abd::BlockStructure::colrow(2, 6, 5, 6), 2);
  const Eigen::MatrixXd d = m.to_dense();
  const Eigen::MatrixXd inv = oracle::dense_solve(d, Eigen::MatrixXd(Eigen::MatrixXd::Identity(d.rows(), d.cols())));
  const double exact = d.cwiseAbs().colwise().sum().maxCoeff() * inv.cwiseAbs().colwise().sum().maxCoeff();
  const double est = abd::condition_estimate(m, abd::factorize(m));
  EXPECT_LE(est, exact * (1 + 1e-10));
  EXPECT_GE(est, exact / 10.0);
}

TEST(Abd, ScalingStructureIsSquare) {
  abd::ScalingOptions opt;
  for (std::size_t n : {256u, 1000u, 4096u}) {
    const auto st = abd::scaling_structure(n, opt);
    EXPECT_GT(st.dimension(), 0u);
  }
  EXPECT_THROW(abd::benchmark_scaling({128, 64}, opt), InvalidArgument);
}
